"""Curvature of a metric from its 2-jet.

Index conventions (all arrays carry an optional leading batch shape):

* ``g[..., i, j]``            metric coefficients
* ``dg[..., i, j, k]``        = d_k g_ij
* ``d2g[..., i, j, k, l]``    = d_k d_l g_ij
* ``gamma[..., l, i, j]``     = Christoffel symbol Gamma^l_ij
* ``riemann[..., p, i, j, k]`` = R^p_ijk = d_j Gamma^p_ik - d_i Gamma^p_jk
                                  + Gamma^p_jr Gamma^r_ik - Gamma^p_ir Gamma^r_jk
* Ricci: Ric_ik = sum_j R^j_ijk, scalar curvature: g^ik Ric_ik.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COND_LIMIT = 1e12
MIN_EIG = 1e-10


class SingularMetricError(np.linalg.LinAlgError):
    """Metric not positive definite or too badly conditioned."""


@dataclass(frozen=True)
class MetricJet2:
    g: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray

    def __post_init__(self):
        for name in ("g", "dg", "d2g"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.g.shape[-1]
        if self.g.shape[-2:] != (n, n) or self.dg.shape[-3:] != (n, n, n) or self.d2g.shape[-4:] != (n, n, n, n):
            raise ValueError("inconsistent metric jet shapes")

    @property
    def n(self) -> int:
        return self.g.shape[-1]

    @property
    def batch_shape(self) -> tuple:
        return self.g.shape[:-2]

    def __getitem__(self, idx) -> "MetricJet2":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return MetricJet2(self.g[idx], self.dg[idx], self.d2g[idx])

    def reshape(self, *shape) -> "MetricJet2":
        n = self.n
        return MetricJet2(self.g.reshape(shape + (n, n)), self.dg.reshape(shape + (n, n, n)),
                          self.d2g.reshape(shape + (n, n, n, n)))

    def symmetry_defect(self) -> float:
        """Largest violation of the index symmetries (0.0 when exact)."""
        d = [
            np.abs(self.g - np.swapaxes(self.g, -1, -2)).max(initial=0.0),
            np.abs(self.dg - np.swapaxes(self.dg, -2, -3)).max(initial=0.0),
            np.abs(self.d2g - np.swapaxes(self.d2g, -3, -4)).max(initial=0.0),
            np.abs(self.d2g - np.swapaxes(self.d2g, -1, -2)).max(initial=0.0),
        ]
        return float(max(d))

    def permuted(self, perm) -> "MetricJet2":
        """Relabel coordinates: new axis ``a`` is old axis ``perm[a]``."""
        p = np.asarray(perm)
        g = self.g[..., p, :][..., :, p]
        dg = self.dg[..., p, :, :][..., :, p, :][..., :, :, p]
        d2g = self.d2g[..., p, :, :, :][..., :, p, :, :][..., :, :, p, :][..., :, :, :, p]
        return MetricJet2(g, dg, d2g)


def check_metric(g: np.ndarray) -> None:
    """Raise :class:`SingularMetricError` unless every g is SPD and well conditioned."""
    w = np.linalg.eigvalsh(g)
    lo, hi = w[..., 0], w[..., -1]
    if np.any(lo <= MIN_EIG) or np.any(hi > COND_LIMIT * lo):
        raise SingularMetricError("metric is singular, indefinite or badly conditioned")


def inverse(g: np.ndarray) -> np.ndarray:
    check_metric(g)
    return np.linalg.inv(g)


def christoffel_first_kind(dg: np.ndarray) -> np.ndarray:
    """Gamma_{p,ij} = (d_i g_jp + d_j g_ip - d_p g_ij) / 2, indexed ``[..., p, i, j]``."""
    return 0.5 * (np.einsum("...jpi->...pij", dg) + np.einsum("...ipj->...pij", dg)
                  - np.einsum("...ijp->...pij", dg))


def _christoffel_parts(mj: MetricJet2):
    gi = inverse(mj.g)
    G1 = christoffel_first_kind(mj.dg)
    dG1 = 0.5 * (np.einsum("...jpik->...pijk", mj.d2g) + np.einsum("...ipjk->...pijk", mj.d2g)
                 - np.einsum("...ijpk->...pijk", mj.d2g))
    gam = np.einsum("...lp,...pij->...lij", gi, G1)
    dgi = -np.einsum("...la,...abk,...bp->...lpk", gi, mj.dg, gi, optimize=True)
    dgam = np.einsum("...lpk,...pij->...lijk", dgi, G1) + np.einsum("...lp,...pijk->...lijk", gi, dG1)
    return gi, gam, dgam


def christoffel(mj: MetricJet2) -> np.ndarray:
    """Christoffel symbols of the second kind ``[..., l, i, j]``."""
    gi = inverse(mj.g)
    return np.einsum("...lp,...pij->...lij", gi, christoffel_first_kind(mj.dg))


def christoffel_derivative(mj: MetricJet2) -> np.ndarray:
    """``[..., l, i, j, k]`` = d_k Gamma^l_ij, via d(g^-1) = -g^-1 (dg) g^-1."""
    return _christoffel_parts(mj)[2]


def riemann(mj: MetricJet2) -> np.ndarray:
    _, gam, dgam = _christoffel_parts(mj)
    return (np.einsum("...pikj->...pijk", dgam) - np.einsum("...pjki->...pijk", dgam)
            + np.einsum("...pjr,...rik->...pijk", gam, gam) - np.einsum("...pir,...rjk->...pijk", gam, gam))


def ricci_numpy(mj: MetricJet2):
    """Ricci tensor and scalar curvature (numpy path)."""
    gi, gam, dgam = _christoffel_parts(mj)
    ric = (np.einsum("...jikj->...ik", dgam) - np.einsum("...jjki->...ik", dgam)
           + np.einsum("...jjr,...rik->...ik", gam, gam) - np.einsum("...jir,...rjk->...ik", gam, gam))
    return ric, np.einsum("...ik,...ik->...", gi, ric)


def ricci_from_riemann(mj: MetricJet2):
    """Second assembly path: trace the full Riemann tensor."""
    R = riemann(mj)
    ric = np.einsum("...jijk->...ik", R)
    gi = inverse(mj.g)
    return ric, np.einsum("...ik,...ik->...", gi, ric)


# ---------------------------------------------------------------------------
# split formulas


def ricci_split(mj: MetricJet2):
    """Ricci = part linear in second derivatives + part quadratic in first derivatives."""
    gi = inverse(mj.g)
    d2, dg = mj.d2g, mj.dg
    R2 = 0.5 * (np.einsum("...jp,...ipjk->...ik", gi, d2) - np.einsum("...jp,...jpik->...ik", gi, d2)
                - np.einsum("...jp,...ikjp->...ik", gi, d2) + np.einsum("...jp,...jkip->...ik", gi, d2))
    G1 = christoffel_first_kind(dg)  # A(k,p,i) = 2 G1[p,i,k]
    U = np.einsum("...jl,...lqj->...q", gi, dg)
    W = np.einsum("...jl,...jlq->...q", gi, dg)
    V = np.einsum("...jl,...jql->...q", gi, dg)
    c = -U + W - V
    t1 = np.einsum("...pq,...q,...pik->...ik", gi, c, G1)
    M = (np.einsum("...lqi->...lqi", dg) - np.einsum("...ilq->...lqi", dg) + np.einsum("...iql->...lqi", dg))
    t2 = np.einsum("...jl,...pq,...lqi,...pjk->...ik", gi, gi, M, G1, optimize=True)
    R1 = 0.5 * (t1 + t2)
    return R2, R1


def scalar_split(mj: MetricJet2):
    """Scalar curvature = S2 (second derivatives) + S1 (quadratic in first derivatives)."""
    gi = inverse(mj.g)
    d2, D = mj.d2g, mj.dg
    S2 = (np.einsum("...ik,...jp,...ipjk->...", gi, gi, d2, optimize=True)
          - np.einsum("...ip,...jk,...ipjk->...", gi, gi, d2, optimize=True))
    e = lambda spec, *ops: np.einsum(spec, *ops, optimize=True)  # noqa: E731
    S1 = 0.25 * (
        -4 * e("...ik,...jl,...pq,...lqj,...kpi->...", gi, gi, gi, D, D)
        + 4 * e("...ik,...jl,...pq,...lqj,...ikp->...", gi, gi, gi, D, D)
        + 3 * e("...ik,...jl,...pq,...lqi,...jpk->...", gi, gi, gi, D, D)
        - e("...ik,...jl,...pq,...jlq,...ikp->...", gi, gi, gi, D, D)
        - 2 * e("...ik,...jl,...pq,...ilq,...kpj->...", gi, gi, gi, D, D)
    )
    return S2, S1


# ---------------------------------------------------------------------------
# diagonal metrics g = diag(exp(2 f_i))


def diagonal_metric_jet(f: np.ndarray, df: np.ndarray, d2f: np.ndarray) -> MetricJet2:
    """Assemble the metric jet of diag(exp(2 f_i)).

    ``f[..., r]``, ``df[..., r, k]`` = d_k f_r, ``d2f[..., r, k, l]``.
    """
    n = f.shape[-1]
    B = f.shape[:-1]
    e = np.exp(2 * f)
    g = np.zeros(B + (n, n))
    dg = np.zeros(B + (n, n, n))
    d2g = np.zeros(B + (n, n, n, n))
    for r in range(n):
        g[..., r, r] = e[..., r]
        dg[..., r, r, :] = 2 * e[..., r, None] * df[..., r, :]
        d2g[..., r, r, :, :] = e[..., r, None, None] * (
            2 * d2f[..., r, :, :] + 4 * df[..., r, :, None] * df[..., r, None, :])
    return MetricJet2(g, dg, d2g)


def diagonal_scalar_parts(f: np.ndarray, df: np.ndarray, d2f: np.ndarray):
    """(S2, S1) of diag(exp(2 f_i)) from the exponent jets."""
    n = f.shape[-1]
    em = np.exp(-2 * f)
    S2 = 0.0
    S1 = 0.0
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            S2 = S2 - 2 * em[..., i] * d2f[..., j, i, i]
            S1 = S1 + 2 * em[..., i] * df[..., i, i] * df[..., j, i] - 2 * em[..., i] * df[..., j, i] ** 2
            for p in range(n):
                if p not in (i, j):
                    S1 = S1 - em[..., p] * df[..., j, p] * df[..., i, p]
    return np.asarray(S2, dtype=float), np.asarray(S1, dtype=float)


def diagonal_ricci_parts(f: np.ndarray, df: np.ndarray, d2f: np.ndarray):
    """(R2, R1) Ricci parts of diag(exp(2 f_i)) from the exponent jets."""
    n = f.shape[-1]
    B = f.shape[:-1]
    R2 = np.zeros(B + (n, n))
    R1 = np.zeros(B + (n, n))

    def ex(a, b):
        return np.exp(2 * (f[..., a] - f[..., b]))

    for i in range(n):
        others = [j for j in range(n) if j != i]
        for j in others:
            R2[..., i, i] -= d2f[..., j, i, i] + ex(i, j) * d2f[..., i, j, j]
            R1[..., i, i] += (ex(i, j) * df[..., j, j] * df[..., i, j] - df[..., j, i] ** 2
                              + df[..., j, i] * df[..., i, i] - ex(i, j) * df[..., i, j] ** 2)
            for p in range(n):
                if p not in (i, j):
                    R1[..., i, i] -= ex(i, p) * df[..., j, p] * df[..., i, p]
        for k in others:
            for j in range(n):
                if j in (i, k):
                    continue
                R2[..., i, k] -= d2f[..., j, i, k]
                R1[..., i, k] += (-df[..., j, i] * df[..., j, k] + df[..., j, k] * df[..., k, i]
                                  + df[..., j, i] * df[..., i, k])
    return R2, R1
