"""Mixed corrugation process and measurement of its asymptotic laws.

Given a base map ``f``, two loop families ``gamma`` and ``delta``, an axis ``i``
and an integer frequency ``N``, the corrugated map is

    F(x) = f(x) + Int(gamma_x)(N x_i) / N + Int^2(delta_x)(N x_i) / N^2.

Axes are 0-based throughout the package.
"""
from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass
from typing import Sequence

import numpy as np

from .grids import DEFAULT_CHUNK, TensorGrid
from .jets import coordinate_jets
from .loops import TrigLoopFamily, int_loop


class ResolutionError(ValueError):
    """Sampling grid too coarse to resolve the oscillation."""


@dataclass(frozen=True)
class CorrugationSpec:
    base: tuple
    gamma: TrigLoopFamily
    delta: TrigLoopFamily
    axis: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        m = len(self.base)
        if self.gamma.m_out != m or self.delta.m_out != m:
            raise ValueError("base, gamma and delta must have the same arity")
        n = self.base[0].n
        if any(f.n != n for f in self.base) or self.gamma.n != n or self.delta.n != n:
            raise ValueError("base, gamma and delta must live on the same domain")
        if not 0 <= self.axis < n:
            raise ValueError(f"axis must be in [0, {n})")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        object.__setattr__(self, "N", int(self.N))

    @property
    def n(self) -> int:
        return self.base[0].n

    @property
    def m_out(self) -> int:
        return len(self.base)


def corrugate(spec: CorrugationSpec) -> list:
    """Corrugated map as a list of :class:`ScalarField` (one per component)."""
    N = spec.N
    first = int_loop(spec.gamma).compose(spec.axis, N)
    second = int_loop(int_loop(spec.delta)).compose(spec.axis, N)
    out = []
    for r, f in enumerate(spec.base):
        g1 = spec.gamma.component(r)
        d1 = spec.delta.component(r)
        F = f
        if not g1.is_zero():
            F = F + first[r] * (1.0 / N)
        if not d1.is_zero():
            F = F + second[r] * (1.0 / (N * N))
        out.append(F)
    return out


@dataclass(frozen=True)
class JetPrediction:
    """Leading-order predictions, each of shape ``B + (m_out,)`` (``dij``: ``B + (n, m_out)``)."""

    di: np.ndarray
    dii: np.ndarray
    dij: np.ndarray


def _predict(spec: CorrugationSpec, X: tuple, cache: dict) -> JetPrediction:
    i, N = spec.axis, spec.N
    t = N * X[i].value
    g_jets, g_dots = spec.gamma.evaluate(X, cache, t)
    d_jets, _ = spec.delta.evaluate(X, cache, t)
    g_mean = spec.gamma.mean_jets(X, cache)
    d_mean = spec.delta.mean_jets(X, cache)
    di, dii, dij = [], [], []
    for r, f in enumerate(spec.base):
        fj = f._eval(X, cache)
        gj, gm = g_jets[r], g_mean[r]
        di.append(fj.grad[..., i] + gj.value - gm.value)
        dii.append(fj.hess[..., i, i] + 2.0 * (gj.grad[..., i] - gm.grad[..., i])
                   + N * g_dots[r] + d_jets[r].value - d_mean[r].value)
        dij.append(fj.hess[..., i, :] + gj.grad - gm.grad)
    return JetPrediction(np.stack(di, -1), np.stack(dii, -1), np.stack(dij, -1))


def predicted_first_jet(spec: CorrugationSpec, x) -> JetPrediction:
    """Leading-order expressions for the axis derivatives of the corrugated map.

    ``dij[..., j, r]`` predicts the mixed derivative along ``(axis, j)``; the
    entry ``j == axis`` is filled with the same expression for convenience but is
    not a valid prediction of the pure derivative.
    """
    X = coordinate_jets(x, spec.n)
    return _predict(spec, X, {})


@dataclass(frozen=True)
class DeviationReport:
    N: int
    dev_c0: float
    dev_dj: float
    dev_djk: float
    dev_di: float
    dev_dii: float
    dev_dij: float

    COLUMNS = ("N", "dev_c0", "dev_dj", "dev_djk", "dev_di", "dev_dii", "dev_dij")

    def values(self) -> tuple:
        return astuple(self)[1:]

    def to_csv_row(self) -> list:
        return [str(self.N)] + [repr(float(v)) for v in self.values()]

    @classmethod
    def from_csv_row(cls, row: Sequence[str]) -> "DeviationReport":
        return cls(int(row[0]), *(float(v) for v in row[1:7]))


def reports_to_csv(reports: Sequence[DeviationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DeviationReport.COLUMNS)
    for rep in reports:
        w.writerow(rep.to_csv_row())
    return buf.getvalue()


def deviation_report(spec: CorrugationSpec, grid: TensorGrid, chunk: int = DEFAULT_CHUNK) -> DeviationReport:
    """Sup-norm deviations of the corrugated map from its predicted jets."""
    i, N, n = spec.axis, spec.N, spec.n
    if grid.n != n:
        raise ValueError("grid dimension does not match the domain")
    if grid.shape[i] < 4 * N:
        raise ResolutionError(f"need at least {4 * N} samples along axis {i}, got {grid.shape[i]}")
    F = corrugate(spec)
    others = [j for j in range(n) if j != i]
    dev = np.zeros(6)
    for pts in grid.chunks(chunk):
        X = coordinate_jets(pts, n)
        cache: dict = {}
        pred = _predict(spec, X, cache)
        for r in range(spec.m_out):
            Fj = F[r]._eval(X, cache)
            fj = spec.base[r]._eval(X, cache)
            d = [
                np.abs(Fj.value - fj.value).max(),
                np.abs(Fj.grad[:, others] - fj.grad[:, others]).max() if others else 0.0,
                np.abs(Fj.hess[:, others][:, :, others] - fj.hess[:, others][:, :, others]).max() if others else 0.0,
                np.abs(Fj.grad[:, i] - pred.di[:, r]).max(),
                np.abs(Fj.hess[:, i, i] - pred.dii[:, r]).max(),
                np.abs(Fj.hess[:, i, others] - pred.dij[:, others, r]).max() if others else 0.0,
            ]
            dev = np.maximum(dev, d)
    return DeviationReport(N, *(float(v) for v in dev))
