"""Metric fields and small helpers for matrices of jets."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..grids import DEFAULT_CHUNK, TensorGrid
from ..jets import Jet2, ScalarField, coordinate_jets
from .backend import ricci_scalar
from .engine import MetricJet2


def jet_matmul(A: Sequence[Sequence[Jet2]], B: Sequence[Sequence[Jet2]]) -> list:
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = A[i][0] * B[0][j]
            for k in range(1, m):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def jet_transpose(A: Sequence[Sequence[Jet2]]) -> list:
    return [list(col) for col in zip(*A)]


def stack_metric_jets(M: Sequence[Sequence[Jet2]]) -> MetricJet2:
    """Pack a symmetric matrix of jets (upper triangle is read) into a MetricJet2."""
    n = len(M)
    shape = M[0][0].shape
    g = np.empty(shape + (n, n))
    dg = np.empty(shape + (n, n, n))
    d2g = np.empty(shape + (n, n, n, n))
    for i in range(n):
        for j in range(i, n):
            J = M[i][j]
            for a, b in ((i, j), (j, i)):
                g[..., a, b] = J.value
                dg[..., a, b, :] = J.grad
                d2g[..., a, b, :, :] = J.hess
    return MetricJet2(g, dg, d2g)


MatrixEvaluator = Callable[[tuple, dict], list]


class MetricField:
    """Symmetric-matrix-valued field evaluable to full metric 2-jets.

    ``fn(X, cache)`` returns an ``n x n`` nested list of :class:`Jet2` (only the
    upper triangle is read).  A single evaluator lets entries share intermediate
    work such as frame computations.
    """

    def __init__(self, fn: MatrixEvaluator, n: int, periodic: Sequence[bool] | None = None):
        self._fn = fn
        self.n = int(n)
        self.periodic = tuple(periodic) if periodic is not None else (True,) * self.n

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[ScalarField | float]], n: int | None = None,
                     periodic: Sequence[bool] | None = None) -> "MetricField":
        """Build from a nested list of fields or numbers (upper triangle used)."""
        n = n or len(entries)
        fields = [[None] * n for _ in range(n)]
        per = [True] * n
        for i in range(n):
            for j in range(i, n):
                e = entries[i][j]
                if not isinstance(e, ScalarField):
                    e = ScalarField.constant(float(e), n)
                fields[i][j] = e
                per = [p and q for p, q in zip(per, e.periodic)]
        if periodic is not None:
            per = list(periodic)

        def fn(X, cache):
            M = [[None] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    M[i][j] = fields[i][j]._eval(X, cache)
                    M[j][i] = M[i][j]
            return M

        return cls(fn, n, per)

    @classmethod
    def identity(cls, n: int, periodic: Sequence[bool] | None = None) -> "MetricField":
        return cls.from_entries([[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)], n, periodic)

    @classmethod
    def conformal(cls, phi: ScalarField) -> "MetricField":
        """exp(2 phi) times the identity."""
        n = phi.n
        e = (phi * 2.0).exp()
        zero = ScalarField.constant(0.0, n)
        return cls.from_entries([[e if i == j else zero for j in range(n)] for i in range(n)], n, phi.periodic)

    def _eval(self, X: tuple, cache: dict) -> list:
        key = id(self)
        hit = cache.get(key)
        if hit is not None:
            return hit[1]
        M = self._fn(X, cache)
        cache[key] = (self, M)
        return M

    def jets(self, points, cache: dict | None = None) -> MetricJet2:
        X = coordinate_jets(points, self.n)
        return stack_metric_jets(self._eval(X, {} if cache is None else cache))

    def values(self, points) -> np.ndarray:
        return self.jets(points).g

    def entry(self, i: int, j: int) -> ScalarField:
        return ScalarField(lambda X, c: self._eval(X, c)[i][j], self.n, self.periodic)

    def scalar_curvature(self, points, backend: str | None = None) -> np.ndarray:
        return ricci_scalar(self.jets(points), backend)[1]


def sample_on_grid(grid: TensorGrid, fn: Callable[[np.ndarray], np.ndarray], chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """Apply ``fn`` to flat point blocks and reshape to the grid shape."""
    parts = [np.asarray(fn(pts)) for pts in grid.chunks(chunk)]
    out = np.concatenate(parts, axis=0)
    return out.reshape(grid.shape + out.shape[1:])


def scalar_on_grid(metric: MetricField, grid: TensorGrid, backend: str | None = None,
                   chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    return sample_on_grid(grid, lambda p: metric.scalar_curvature(p, backend), chunk)
