"""Jet coordinates, relations semilinear in the first axis, and loop conditions.

A relation is semilinear in ``x_1`` (axis 0 here) when it reads

    L(s0) . s2_11 + R(s0, s_check, s1_1, s2_1*) = 0

where ``s_check`` is the jet with the point, ``s1_1`` and every ``s2_1j``
removed.  Its ``eps``-thickening replaces ``= 0`` by ``in (-eps, eps)``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .jets import Jet2, ScalarField, coordinate_jets
from .loops import TrigLoopFamily


def pair_index(n: int) -> list:
    """Packed order of the unordered index pairs ``(i, j)``, ``i <= j``."""
    return [(i, j) for i in range(n) for j in range(i, n)]


@dataclass(frozen=True)
class SigmaJet:
    """Batched 2-jet coordinates of an ``R^m``-valued map.

    ``sigma0``: ``B + (n,)``; ``value``: ``B + (m,)``; ``first``: ``B + (n, m)``;
    ``second``: ``B + (n(n+1)/2, m)`` in :func:`pair_index` order.
    """

    sigma0: np.ndarray
    value: np.ndarray
    first: np.ndarray
    second: np.ndarray

    @property
    def n(self) -> int:
        return self.sigma0.shape[-1]

    @property
    def m(self) -> int:
        return self.value.shape[-1]

    @classmethod
    def from_jets(cls, points, jets: Sequence[Jet2]) -> "SigmaJet":
        pts = np.asarray(points, dtype=float)
        n = pts.shape[-1]
        pairs = pair_index(n)
        value = np.stack([j.value for j in jets], -1)
        first = np.stack([j.grad for j in jets], -1)
        second = np.stack([np.stack([j.hess[..., a, b] for a, b in pairs], -1) for j in jets], -1)
        B = np.broadcast_shapes(pts.shape[:-1], value.shape[:-1])
        return cls(np.broadcast_to(pts, B + (n,)), value, first, second)

    @classmethod
    def zero(cls, points, m: int) -> "SigmaJet":
        pts = np.asarray(points, dtype=float)
        n = pts.shape[-1]
        B = pts.shape[:-1]
        return cls(pts, np.zeros(B + (m,)), np.zeros(B + (n, m)), np.zeros(B + (n * (n + 1) // 2, m)))

    def second_full(self) -> np.ndarray:
        n = self.n
        out = np.empty(self.second.shape[:-2] + (n, n, self.m))
        for p, (a, b) in enumerate(pair_index(n)):
            out[..., a, b, :] = self.second[..., p, :]
            out[..., b, a, :] = self.second[..., p, :]
        return out

    @property
    def sigma11(self) -> np.ndarray:
        return self.second[..., 0, :]

    @property
    def first1(self) -> np.ndarray:
        return self.first[..., 0, :]

    @property
    def second1star(self) -> np.ndarray:
        """``s2_1j`` for ``j = 1..n-1`` (0-based), shape ``B + (n-1, m)``."""
        return self.second[..., 1:self.n, :]

    def checked(self) -> "CheckedSigma":
        n = self.n
        rest = [p for p, (a, b) in enumerate(pair_index(n)) if a >= 1]
        return CheckedSigma(self.value, self.first[..., 1:, :], self.second[..., rest, :])


@dataclass(frozen=True)
class CheckedSigma:
    """Jet with the point, ``s1_1`` and every ``s2_1j`` removed.

    ``second_rest`` holds ``s2_ij`` for ``1 <= i <= j`` (0-based) in packed order.
    """

    value: np.ndarray
    first_rest: np.ndarray
    second_rest: np.ndarray


def assemble_jets(sigma0, checked: CheckedSigma, first1, second1star, sigma11=None) -> list:
    """Rebuild per-component :class:`Jet2` from split coordinates (``s2_11`` defaults to 0)."""
    sigma0 = np.asarray(sigma0, dtype=float)
    n = sigma0.shape[-1]
    m = checked.value.shape[-1]
    B = np.broadcast_shapes(sigma0.shape[:-1], checked.value.shape[:-1], np.shape(first1)[:-1])
    grad = np.empty(B + (n, m))
    grad[..., 0, :] = first1
    grad[..., 1:, :] = checked.first_rest
    hess = np.empty(B + (n, n, m))
    hess[..., 0, 0, :] = 0.0 if sigma11 is None else sigma11
    hess[..., 0, 1:, :] = second1star
    hess[..., 1:, 0, :] = second1star
    rest = [(a, b) for a, b in pair_index(n) if a >= 1]
    for p, (a, b) in enumerate(rest):
        hess[..., a, b, :] = checked.second_rest[..., p, :]
        hess[..., b, a, :] = checked.second_rest[..., p, :]
    value = np.broadcast_to(checked.value, B + (m,))
    return [Jet2(value[..., r].copy(), grad[..., r].copy(), hess[..., r].copy()) for r in range(m)]


RFunction = Callable[[np.ndarray, CheckedSigma, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SemilinearRelation:
    """``L`` is a covector of fields (length ``m``); ``R`` acts on split coordinates.

    ``kind`` tags relation families with extra structure (``"curvature"`` for the
    two-component scalar-curvature relations with ``L`` proportional to ``(1, 1)``).
    """

    L: tuple
    R: RFunction
    epsilon: float
    kind: str = "generic"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "L", tuple(self.L))
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def m(self) -> int:
        return len(self.L)

    def L_jets(self, points) -> list:
        X = coordinate_jets(points, self.L[0].n)
        cache: dict = {}
        return [f._eval(X, cache) for f in self.L]

    def L_values(self, points) -> np.ndarray:
        return np.stack([j.value for j in self.L_jets(points)], -1)


def residual(rel: SemilinearRelation, sigma: SigmaJet) -> np.ndarray:
    """``L(s0) . s2_11 + R(s0, s_check, s1_1, s2_1*)``."""
    if sigma.m != rel.m:
        raise ValueError("arity mismatch between relation and jet")
    L = rel.L_values(sigma.sigma0)
    return np.sum(L * sigma.sigma11, axis=-1) + rel.R(sigma.sigma0, sigma.checked(), sigma.first1, sigma.second1star)


def in_thickening(rel: SemilinearRelation, sigma: SigmaJet) -> np.ndarray:
    return np.abs(residual(rel, sigma)) < rel.epsilon


def hull_feasibility(rel: SemilinearRelation, sigma: SigmaJet, x=None) -> np.ndarray:
    """Whether the origin lies in the convex hull of the admissible loop values.

    Only the two-component curvature relations are supported.  Restricted to
    ``ker L`` the admissible set is the graph of a concave quadratic in the
    first-derivative direction, whose hull contains the origin exactly when the
    residual of the frozen jet is nonnegative.
    """
    if rel.kind != "curvature" or rel.m != 2:
        raise NotImplementedError("hull feasibility is only implemented for two-component curvature relations")
    if x is not None:
        x = np.asarray(x, dtype=float)
        sigma = SigmaJet(np.broadcast_to(x, sigma.sigma0.shape), sigma.value, sigma.first, sigma.second)
    return residual(rel, sigma) >= 0.0


# ---------------------------------------------------------------------------
# loop conditions


@dataclass(frozen=True)
class ConditionReport:
    l1_gamma: float
    l1_delta: float
    l2_max: float
    l2_dl_max: float
    l3_max: float

    COLUMNS = ("l1_gamma", "l1_delta", "l2_max", "l2_dl_max", "l3_max")

    def values(self) -> tuple:
        return (self.l1_gamma, self.l1_delta, self.l2_max, self.l2_dl_max, self.l3_max)

    def max(self) -> float:
        return max(self.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        w.writerow([repr(float(v)) for v in self.values()])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ConditionReport":
        rows = list(csv.reader([ln for ln in text.splitlines() if ln and not ln.startswith("#")]))
        return cls(*(float(v) for v in rows[1]))


def verify_loop_conditions(rel: SemilinearRelation, f: Sequence[ScalarField], gamma: TrigLoopFamily,
                           delta: TrigLoopFamily, sample_points, t_grid=None) -> ConditionReport:
    """Measure the three loop conditions at the sample points.

    The mean conditions are read off the constant terms exactly; the others are
    evaluated on ``t_grid`` (64 uniform points by default).
    """
    pts = np.asarray(sample_points, dtype=float).reshape(-1, gamma.n)
    t = np.arange(64) / 64 if t_grid is None else np.asarray(t_grid, dtype=float)
    P, T = pts.shape[0], t.shape[0]
    X = coordinate_jets(pts, gamma.n)
    cache: dict = {}
    l1g = max((np.abs(j.value).max() for j in gamma.mean_jets(X, cache)), default=0.0)
    l1d = max((np.abs(j.value).max() for j in delta.mean_jets(X, cache)), default=0.0)

    # broadcast samples against the t grid
    pts_t = np.repeat(pts, T, axis=0)
    tt = np.tile(t, P)
    Xt = coordinate_jets(pts_t, gamma.n)
    cache_t: dict = {}
    g_jets, _ = gamma.evaluate(Xt, cache_t, tt)
    d_jets, _ = delta.evaluate(Xt, cache_t, tt)
    L_jets = [fl._eval(Xt, cache_t) for fl in rel.L]
    gval = np.stack([j.value for j in g_jets], -1)
    Lval = np.stack([j.value for j in L_jets], -1)
    dL1 = np.stack([j.grad[..., 0] for j in L_jets], -1)
    l2 = float(np.abs(np.sum(Lval * gval, -1)).max())
    l2d = float(np.abs(np.sum(dL1 * gval, -1)).max())

    sigma = SigmaJet.from_jets(pts_t, [fi._eval(Xt, cache_t) for fi in f])
    dgam = np.stack([j.grad[..., 1:] for j in g_jets], -1)  # (P*T, n-1, m)
    dval = np.stack([j.value for j in d_jets], -1)
    lhs = np.sum(Lval * (sigma.sigma11 + dval), -1) + rel.R(
        pts_t, sigma.checked(), sigma.first1 + gval, sigma.second1star + dgam)
    l3 = float(np.abs(lhs).max())
    return ConditionReport(float(l1g), float(l1d), l2, l2d, l3)
