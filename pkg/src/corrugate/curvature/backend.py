"""Selection between the compiled curvature kernel and the numpy fallback.

The compiled kernel is used when it imports and ``CORRUGATE_PURE_PYTHON`` is not
set to a true value.
"""
from __future__ import annotations

import os

import numpy as np

from .engine import MetricJet2, inverse, ricci_numpy

_FORCE_PURE = os.environ.get("CORRUGATE_PURE_PYTHON", "").lower() in ("1", "true", "yes")

try:
    if _FORCE_PURE:
        raise ImportError("compiled kernel disabled by CORRUGATE_PURE_PYTHON")
    from ._kernels import ricci_scalar_batch as _compiled
    BACKEND = "compiled"
except ImportError:
    _compiled = None
    BACKEND = "numpy"

CHUNK = 8192


def compiled_available() -> bool:
    return _compiled is not None


def ricci_scalar(mj: MetricJet2, backend: str | None = None):
    """Ricci tensor and scalar curvature of a batched metric jet.

    ``backend`` is ``"compiled"``, ``"numpy"`` or ``None`` for the module default.
    """
    backend = backend or BACKEND
    if backend == "compiled" and _compiled is None:
        raise RuntimeError("compiled curvature kernel is not available")
    shape = mj.batch_shape
    n = mj.n
    flat = mj.reshape(-1)
    P = flat.g.shape[0]
    ric = np.empty((P, n, n))
    scal = np.empty(P)
    for s in range(0, P, CHUNK):
        part = flat[s:s + CHUNK]
        if backend == "compiled":
            gi = np.ascontiguousarray(inverse(part.g))
            r, sc = _compiled(gi, np.ascontiguousarray(part.dg), np.ascontiguousarray(part.d2g))
        else:
            r, sc = ricci_numpy(part)
        ric[s:s + CHUNK] = r
        scal[s:s + CHUNK] = sc
    return ric.reshape(shape + (n, n)), scal.reshape(shape)


def ricci(mj: MetricJet2, backend: str | None = None) -> np.ndarray:
    return ricci_scalar(mj, backend)[0]


def scalar(mj: MetricJet2, backend: str | None = None) -> np.ndarray:
    return ricci_scalar(mj, backend)[1]
