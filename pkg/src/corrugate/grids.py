"""Tensor-product sampling grids."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

DEFAULT_CHUNK = 16384


@dataclass(frozen=True)
class TensorGrid:
    """Cartesian product of 1-D coordinate arrays."""

    axes: tuple

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(np.asarray(a, dtype=float) for a in self.axes))

    @classmethod
    def uniform(cls, sizes: Sequence[int], bounds: Sequence | None = None) -> "TensorGrid":
        """``sizes[a]`` samples per axis.

        With ``bounds[a] = None`` (the default) the axis is the periodic unit
        interval sampled at ``j / M``; otherwise ``(lo, hi)`` is sampled at cell
        midpoints so no sample sits on the boundary.
        """
        axes = []
        for a, M in enumerate(sizes):
            b = None if bounds is None else bounds[a]
            if b is None:
                axes.append(np.arange(M) / M)
            else:
                lo, hi = b
                axes.append(lo + (np.arange(M) + 0.5) * (hi - lo) / M)
        return cls(tuple(axes))

    @classmethod
    def for_corrugation(cls, n: int, axis: int, N: int, per_oscillation: int = 4, slow: int = 16,
                        bounds: Sequence | None = None) -> "TensorGrid":
        sizes = [slow] * n
        sizes[axis] = max(per_oscillation * N, slow)
        return cls.uniform(sizes, bounds)

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def points(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def chunks(self, chunk: int = DEFAULT_CHUNK) -> Iterator[np.ndarray]:
        """Yield flat ``(k, n)`` blocks of points covering the grid in C order."""
        shape = self.shape
        total = self.size
        for start in range(0, total, chunk):
            idx = np.unravel_index(np.arange(start, min(total, start + chunk)), shape)
            yield np.stack([self.axes[a][idx[a]] for a in range(self.n)], axis=-1)

    def restrict(self, masks: Sequence) -> "TensorGrid":
        """Keep only the samples selected by a boolean mask per axis."""
        return TensorGrid(tuple(a[np.asarray(m, dtype=bool)] if m is not None else a
                                for a, m in zip(self.axes, masks)))
