"""Finite-difference metric jets, used as an independent check on analytic jets."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .engine import MetricJet2


class BoundaryProximityError(ValueError):
    """Stencil would leave the domain along a non-periodic axis."""


def _stencil_derivatives(value_map, x: np.ndarray, h: float):
    n = x.shape[-1]
    B = x.shape[:-1]
    E = np.eye(n) * h
    # gather all stencil points for one batched call
    offsets = [np.zeros(n)]
    for k in range(n):
        offsets += [E[k], -E[k]]
    for k in range(n):
        for l in range(k + 1, n):
            offsets += [E[k] + E[l], E[k] - E[l], -E[k] + E[l], -E[k] - E[l]]
    offsets = np.array(offsets)
    pts = x[..., None, :] + offsets
    vals = np.asarray(value_map(pts.reshape(-1, n))).reshape(B + (len(offsets), n, n))
    g0 = vals[..., 0, :, :]
    dg = np.empty(B + (n, n, n))
    d2g = np.empty(B + (n, n, n, n))
    for k in range(n):
        p, m = vals[..., 1 + 2 * k, :, :], vals[..., 2 + 2 * k, :, :]
        dg[..., k] = (p - m) / (2 * h)
        d2g[..., k, k] = (p - 2 * g0 + m) / (h * h)
    idx = 1 + 2 * n
    for k in range(n):
        for l in range(k + 1, n):
            pp, pm, mp, mm = (vals[..., idx + s, :, :] for s in range(4))
            idx += 4
            mixed = (pp - pm - mp + mm) / (4 * h * h)
            d2g[..., k, l] = mixed
            d2g[..., l, k] = mixed
    return g0, dg, d2g


def fd_metric_jet(value_map: Callable[[np.ndarray], np.ndarray], x, h: float,
                  bounds: Sequence | None = None) -> MetricJet2:
    """Central-difference metric jet with one Richardson step (error O(h^4)).

    ``value_map`` maps points ``(P, n)`` to metric values ``(P, n, n)``.
    ``bounds[a]`` is ``None`` for periodic axes, ``(lo, hi)`` otherwise.
    """
    x = np.asarray(x, dtype=float)
    if bounds is not None:
        for a, b in enumerate(bounds):
            if b is None:
                continue
            lo, hi = b
            if np.any(x[..., a] - lo <= 2 * h) or np.any(hi - x[..., a] <= 2 * h):
                raise BoundaryProximityError(f"point within 2h of the boundary on axis {a}")
    g, dg1, d2g1 = _stencil_derivatives(value_map, x, h)
    _, dg2, d2g2 = _stencil_derivatives(value_map, x, h / 2)
    dg = (4 * dg2 - dg1) / 3
    d2g = (4 * d2g2 - d2g1) / 3
    # symmetrize in the metric indices (exact for symmetric value maps)
    g = 0.5 * (g + np.swapaxes(g, -1, -2))
    dg = 0.5 * (dg + np.swapaxes(dg, -2, -3))
    d2g = 0.5 * (d2g + np.swapaxes(d2g, -3, -4))
    return MetricJet2(g, dg, d2g)


def fd_gradient(fn: Callable[[np.ndarray], np.ndarray], x, h: float):
    """Richardson-refined central differences of a scalar map: (gradient, Hessian)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]

    def wrapped(p):
        v = np.asarray(fn(p))
        return np.broadcast_to(v[..., None, None], v.shape + (n, n))

    _, dg1, d2g1 = _stencil_derivatives(wrapped, x, h)
    _, dg2, d2g2 = _stencil_derivatives(wrapped, x, h / 2)
    dg = (4 * dg2 - dg1) / 3
    d2g = (4 * d2g2 - d2g1) / 3
    return dg[..., 0, 0, :], d2g[..., 0, 0, :, :]
