"""Diagonal metrics and diagonal perturbations of a framed metric.

A framed metric is ``gbar = A^T A`` with ``A(xbar) = Id``; its perturbation is
``ghat = A^T D A`` with ``D = diag(exp(2 f_1), ..., exp(2 f_n))``.  At ``xbar``

    Scal(ghat) = Scal(gbar) + B + Q + E

with B linear in the second derivatives of f, Q quadratic in their first
derivatives, and E the remainder (computed here as a difference).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..jets import ScalarField, coordinate_jets, evaluate_fields, jet_exp
from .backend import ricci_scalar
from .engine import diagonal_metric_jet, diagonal_ricci_parts, diagonal_scalar_parts
from .fields import stack_metric_jets


class FrameNotIdentityError(ValueError):
    """The frame is not the identity at the base point."""


def exponent_jets(fields: Sequence[ScalarField], x):
    """(f, df, d2f) arrays for a list of exponent fields at points ``x``."""
    jets = evaluate_fields(list(fields), x)
    f = np.stack([j.value for j in jets], axis=-1)
    df = np.stack([j.grad for j in jets], axis=-2)
    d2f = np.stack([j.hess for j in jets], axis=-3)
    return f, df, d2f


@dataclass(frozen=True)
class DiagonalMetricSpec:
    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(self.exponents))

    @property
    def n(self) -> int:
        return len(self.exponents)

    def metric_jet(self, x):
        return diagonal_metric_jet(*exponent_jets(self.exponents, x))


def diagonal_scalar(spec: DiagonalMetricSpec, x):
    """(S2, S1) of diag(exp(2 f_i)) at ``x`` from the closed-form diagonal formulas."""
    return diagonal_scalar_parts(*exponent_jets(spec.exponents, x))


def diagonal_ricci(spec: DiagonalMetricSpec, x):
    return diagonal_ricci_parts(*exponent_jets(spec.exponents, x))


@dataclass(frozen=True)
class FramePerturbationSpec:
    """Frame ``A`` (nested ``n x n`` ScalarFields) and diagonal exponents ``f``."""

    frame: tuple
    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "frame", tuple(tuple(r) for r in self.frame))
        object.__setattr__(self, "exponents", tuple(self.exponents))
        if len(self.frame) != len(self.exponents):
            raise ValueError("frame and exponents dimension mismatch")

    @property
    def n(self) -> int:
        return len(self.exponents)

    def metric_jets(self, x):
        """Jets of (gbar, ghat) at points ``x``."""
        n = self.n
        X = coordinate_jets(x, n)
        cache: dict = {}
        A = [[self.frame[r][i]._eval(X, cache) for i in range(n)] for r in range(n)]
        D = [jet_exp(self.exponents[r]._eval(X, cache) * 2.0) for r in range(n)]
        gbar = [[None] * n for _ in range(n)]
        ghat = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                sb = A[0][i] * A[0][j]
                sh = D[0] * sb
                for r in range(1, n):
                    t = A[r][i] * A[r][j]
                    sb = sb + t
                    sh = sh + D[r] * t
                gbar[i][j] = gbar[j][i] = sb
                ghat[i][j] = ghat[j][i] = sh
        return stack_metric_jets(gbar), stack_metric_jets(ghat)

    def frame_values(self, x) -> np.ndarray:
        n = self.n
        X = coordinate_jets(x, n)
        cache: dict = {}
        return np.stack([np.stack([self.frame[r][i]._eval(X, cache).value for i in range(n)], -1)
                         for r in range(n)], -2)


def _require_identity(spec: FramePerturbationSpec, xbar, tol: float = 1e-12):
    A = spec.frame_values(xbar)
    err = np.abs(A - np.eye(spec.n)).max()
    if err > tol:
        raise FrameNotIdentityError(f"frame differs from the identity by {err:.3e} at the base point")


def perturbed_BQ(spec: FramePerturbationSpec, xbar):
    """The B and Q terms at ``xbar`` from the exponent jets."""
    _require_identity(spec, xbar)
    f, df, d2f = exponent_jets(spec.exponents, xbar)
    n = spec.n
    em = np.exp(-2 * f)
    B = 0.0
    Q = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            B = B - 2 * em[..., i] * d2f[..., j, i, i]
            Q = Q - 2 * em[..., i] * df[..., j, i] ** 2 + 4 * em[..., i] * df[..., i, i] * df[..., j, i]
            for k in range(n):
                Q = Q - em[..., k] * df[..., i, k] * df[..., j, k]
    return np.asarray(B, dtype=float), np.asarray(Q, dtype=float)


def perturbed_E_remainder(spec: FramePerturbationSpec, xbar, backend: str | None = None):
    """E = Scal(ghat) - Scal(gbar) - B - Q at ``xbar``."""
    B, Q = perturbed_BQ(spec, xbar)
    gbar, ghat = spec.metric_jets(xbar)
    s_bar = ricci_scalar(gbar, backend)[1]
    s_hat = ricci_scalar(ghat, backend)[1]
    return s_hat - s_bar - B - Q
