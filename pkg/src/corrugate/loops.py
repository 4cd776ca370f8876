"""Loop families as trigonometric polynomials with field coefficients.

A loop family assigns to each point ``x`` a 1-periodic loop

    gamma_x(t) = a0(x) + sum_m [a_m(x) cos(2 pi m t) + b_m(x) sin(2 pi m t)]

with one coefficient set per output component.  Because everything is a finite
trigonometric polynomial, means and primitives are exact coefficient maps.

The module also provides the spectral lifts that turn lattice samples into
differentiable coefficient fields.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .jets import Jet2, ScalarField, coordinate_jets, jet_cos, jet_sin

TWO_PI = 2.0 * math.pi


class UnsupportedDomainError(ValueError):
    """Requested lift is not available on the given axes."""


def _as_field(c, n: int) -> ScalarField | None:
    if c is None:
        return None
    if isinstance(c, ScalarField):
        if c.const == 0.0:
            return None
        return c
    c = float(c)
    return None if c == 0.0 else ScalarField.constant(c, n)


def _sum_fields(fields: list, n: int) -> ScalarField | None:
    live = [f for f in fields if f is not None]
    if not live:
        return None
    out = live[0]
    for f in live[1:]:
        out = out + f
    return out


class TrigLoopFamily:
    """Vector-valued loop family with ``m_out`` components and ``M`` modes.

    ``a0`` holds one constant-term coefficient per component; ``cos`` and ``sin``
    hold, per component, the coefficient of each mode ``m = 1..M``.  Coefficients
    may be :class:`ScalarField`, plain numbers, or ``None`` (meaning zero).
    """

    def __init__(self, n: int, a0: Sequence, cos: Sequence | None = None, sin: Sequence | None = None):
        self.n = int(n)
        m_out = len(a0)
        cos = cos if cos is not None else [()] * m_out
        sin = sin if sin is not None else [()] * m_out
        if len(cos) != m_out or len(sin) != m_out:
            raise ValueError("coefficient lists must have one entry per component")
        M = max([len(c) for c in cos] + [len(s) for s in sin] + [0])
        self.a0 = tuple(_as_field(c, self.n) for c in a0)
        self.cos = tuple(tuple(_as_field(c[m], self.n) if m < len(c) else None for m in range(M)) for c in cos)
        self.sin = tuple(tuple(_as_field(s[m], self.n) if m < len(s) else None for m in range(M)) for s in sin)
        self.mode_count = M
        self.m_out = m_out

    @classmethod
    def zero(cls, n: int, m_out: int) -> "TrigLoopFamily":
        return cls(n, [None] * m_out)

    def is_zero(self) -> bool:
        return all(c is None for c in self.a0) and all(
            c is None for comp in self.cos + self.sin for c in comp)

    def component(self, r: int) -> "TrigLoopFamily":
        return TrigLoopFamily(self.n, [self.a0[r]], [self.cos[r]], [self.sin[r]])

    def scaled(self, c: float) -> "TrigLoopFamily":
        def sc(f):
            return None if f is None else f * c
        return TrigLoopFamily(self.n, [sc(f) for f in self.a0],
                              [[sc(f) for f in comp] for comp in self.cos],
                              [[sc(f) for f in comp] for comp in self.sin])

    def with_constant_shift(self, r: int, c: float) -> "TrigLoopFamily":
        a0 = list(self.a0)
        a0[r] = ScalarField.constant(c, self.n) if a0[r] is None else a0[r] + c
        return TrigLoopFamily(self.n, a0, self.cos, self.sin)

    # evaluation -------------------------------------------------------------
    def _coeff_jets(self, X: tuple, cache: dict):
        def ev(f):
            return None if f is None else f._eval(X, cache)
        a0 = [ev(f) for f in self.a0]
        ac = [[ev(f) for f in comp] for comp in self.cos]
        bs = [[ev(f) for f in comp] for comp in self.sin]
        return a0, ac, bs

    def evaluate(self, X: tuple, cache: dict, t):
        """Per-component spatial jets of gamma_x(t) and values of d/dt gamma_x(t)."""
        t = np.asarray(t, dtype=float)
        shape = X[0].shape
        a0, ac, bs = self._coeff_jets(X, cache)
        jets, dots = [], []
        for r in range(self.m_out):
            acc = Jet2.constant(0.0, self.n, shape)
            dot = np.zeros(np.broadcast_shapes(shape, t.shape))
            if a0[r] is not None:
                acc = acc + a0[r]
            for m in range(self.mode_count):
                w = TWO_PI * (m + 1)
                c, s = np.cos(w * t), np.sin(w * t)
                if ac[r][m] is not None:
                    acc = acc + ac[r][m] * c
                    dot = dot - w * s * ac[r][m].value
                if bs[r][m] is not None:
                    acc = acc + bs[r][m] * s
                    dot = dot + w * c * bs[r][m].value
            jets.append(acc)
            dots.append(dot)
        return jets, dots

    def mean_jets(self, X: tuple, cache: dict) -> list:
        shape = X[0].shape
        out = []
        for f in self.a0:
            out.append(Jet2.constant(0.0, self.n, shape) if f is None else f._eval(X, cache))
        return out

    def compose(self, axis: int, N: int) -> list:
        """Fields ``x -> gamma_x(N x_axis)``, one per component, with exact jets."""
        N = int(N)
        fields = []
        for r in range(self.m_out):
            fields.append(ScalarField(_ComposedComponent(self, r, axis, N), self.n,
                                      _composed_periodicity(self, r)))
        return fields


def _composed_periodicity(loop: TrigLoopFamily, r: int):
    per = [True] * loop.n
    for f in (loop.a0[r],) + loop.cos[r] + loop.sin[r]:
        if f is not None:
            per = [p and q for p, q in zip(per, f.periodic)]
    return per


class _ComposedComponent:
    """Evaluator for one component of gamma_x(N x_i)."""

    def __init__(self, loop: TrigLoopFamily, r: int, axis: int, N: int):
        self.loop, self.r, self.axis, self.N = loop, r, axis, N

    def __call__(self, X: tuple, cache: dict):
        loop, r = self.loop, self.r
        shape = X[0].shape
        acc = None
        if loop.a0[r] is not None:
            acc = loop.a0[r]._eval(X, cache)
        for m in range(loop.mode_count):
            fa, fb = loop.cos[r][m], loop.sin[r][m]
            if fa is None and fb is None:
                continue
            cm, sm = _phase_jets(X, cache, self.axis, self.N * (m + 1))
            if fa is not None:
                term = fa._eval(X, cache) * cm
                acc = term if acc is None else acc + term
            if fb is not None:
                term = fb._eval(X, cache) * sm
                acc = term if acc is None else acc + term
        if acc is None:
            return Jet2.constant(0.0, loop.n, shape)
        return acc


def _phase_jets(X: tuple, cache: dict, axis: int, k: int):
    """Jets of cos(2 pi k x_axis) and sin(2 pi k x_axis), cached per evaluation."""
    key = ("phase", axis, k)
    hit = cache.get(key)
    if hit is None:
        arg = X[axis] * (TWO_PI * k)
        hit = (jet_cos(arg), jet_sin(arg))
        cache[key] = hit
    return hit


# ---------------------------------------------------------------------------
# exact operators on coefficients


def int_loop(gamma: TrigLoopFamily) -> TrigLoopFamily:
    """Primitive of the mean-free part, vanishing at t = 0."""
    a0, cos, sin = [], [], []
    for r in range(gamma.m_out):
        new_a = []
        new_b = []
        consts = []
        for m in range(gamma.mode_count):
            w = TWO_PI * (m + 1)
            a, b = gamma.cos[r][m], gamma.sin[r][m]
            new_a.append(None if b is None else b * (-1.0 / w))
            new_b.append(None if a is None else a * (1.0 / w))
            if b is not None:
                consts.append(b * (1.0 / w))
        a0.append(_sum_fields(consts, gamma.n))
        cos.append(new_a)
        sin.append(new_b)
    return TrigLoopFamily(gamma.n, a0, cos, sin)


def loop_mean(gamma: TrigLoopFamily, x) -> np.ndarray:
    """Mean over t of each component at the points ``x`` (shape ``B + (m_out,)``)."""
    X = coordinate_jets(x, gamma.n)
    jets = gamma.mean_jets(X, {})
    return np.stack([j.value for j in jets], axis=-1)


def eval_loop_jet(gamma: TrigLoopFamily, x, t):
    """Return (values, spatial jets per component, t-derivatives) at (x, t)."""
    X = coordinate_jets(x, gamma.n)
    jets, dots = gamma.evaluate(X, {}, t)
    values = np.stack([np.broadcast_to(j.value, np.broadcast_shapes(j.value.shape, np.shape(t)))
                       for j in jets], axis=-1)
    return values, jets, np.stack(dots, axis=-1)


# ---------------------------------------------------------------------------
# spectral lifts


def periodic_lattice(sizes: Sequence[int]) -> np.ndarray:
    """Points ``j / M`` on each axis, shape ``sizes + (len(sizes),)``."""
    axes = [np.arange(M) / M for M in sizes]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def chebyshev_nodes(M: int, lo: float, hi: float) -> np.ndarray:
    """First-kind Chebyshev nodes mapped to ``[lo, hi]`` (descending order)."""
    j = np.arange(M)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(math.pi * (j + 0.5) / M)


def mixed_lattice(sizes: Sequence[int], periodic: Sequence[bool], bounds: Sequence) -> np.ndarray:
    """Sampling lattice for :func:`mixed_lift`.

    Periodic axes use ``j / M``; the others use Chebyshev nodes inside ``bounds[a]``.
    """
    axes = []
    for a, M in enumerate(sizes):
        if periodic[a]:
            axes.append(np.arange(M) / M)
        else:
            lo, hi = bounds[a]
            axes.append(chebyshev_nodes(M, lo, hi))
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


class _FourierAxis:
    def __init__(self, M: int):
        k = np.fft.fftfreq(M, d=1.0 / M).astype(int)
        if M % 2 == 0:
            # split the Nyquist mode evenly between +M/2 and -M/2
            k = np.append(k, M // 2)
        self.k = k
        self.M = M

    def expand(self, C: np.ndarray, axis: int) -> np.ndarray:
        if self.M % 2:
            return C
        C = np.moveaxis(C, axis, 0)
        nyq = self.M // 2
        C = np.concatenate([C, C[nyq:nyq + 1]], axis=0)
        C[nyq] *= 0.5
        C[-1] *= 0.5
        return np.moveaxis(C, 0, axis)

    def basis(self, x, idx):
        k = self.k[idx].astype(float)
        e = np.exp(1j * TWO_PI * np.multiply.outer(x, k))
        d1 = e * (1j * TWO_PI * k)
        d2 = e * (-(TWO_PI ** 2) * k * k)
        return e, d1, d2


class _ChebyshevAxis:
    def __init__(self, M: int, lo: float, hi: float):
        self.M, self.lo, self.hi = M, lo, hi
        self.k = np.arange(M)

    def coefficients(self, C: np.ndarray, axis: int) -> np.ndarray:
        M = self.M
        j = np.arange(M)
        T = np.cos(math.pi * np.outer(self.k, j + 0.5) / M) * (2.0 / M)
        T[0] *= 0.5
        return np.moveaxis(np.tensordot(T, np.moveaxis(C, axis, 0), axes=(1, 0)), 0, axis)

    def basis(self, x, idx):
        scale = 2.0 / (self.hi - self.lo)
        s = (np.asarray(x) - 0.5 * (self.lo + self.hi)) * scale
        K = self.M
        T = np.empty(s.shape + (K,))
        dT = np.empty_like(T)
        d2T = np.empty_like(T)
        T[..., 0], dT[..., 0], d2T[..., 0] = 1.0, 0.0, 0.0
        if K > 1:
            T[..., 1], dT[..., 1], d2T[..., 1] = s, 1.0, 0.0
        for m in range(2, K):
            T[..., m] = 2 * s * T[..., m - 1] - T[..., m - 2]
            dT[..., m] = 2 * T[..., m - 1] + 2 * s * dT[..., m - 1] - dT[..., m - 2]
            d2T[..., m] = 4 * dT[..., m - 1] + 2 * s * d2T[..., m - 1] - d2T[..., m - 2]
        return T[..., idx], dT[..., idx] * scale, d2T[..., idx] * scale * scale


class _TensorSeriesEvaluator:
    """Evaluate sum_K c_K prod_a phi_{a, K_a}(x_a) with exact jets."""

    CHUNK = 4096

    def __init__(self, axes, coeffs: np.ndarray, prune: float):
        self.axes = axes
        flat = coeffs.ravel()
        scale = np.abs(flat).max() if flat.size else 0.0
        keep = np.nonzero(np.abs(flat) > prune * scale)[0] if scale > 0 else np.zeros(0, int)
        self.c = flat[keep]
        self.idx = np.unravel_index(keep, coeffs.shape)

    def __call__(self, X: tuple, cache: dict):
        n = len(X)
        shape = X[0].shape
        P = int(np.prod(shape)) if shape else 1
        value = np.zeros(P)
        grad = np.zeros((P, n))
        hess = np.zeros((P, n, n))
        if self.c.size == 0:
            return Jet2(value.reshape(shape), grad.reshape(shape + (n,)), hess.reshape(shape + (n, n)))
        xs = [x.value.reshape(P) for x in X]
        for s0 in range(0, P, self.CHUNK):
            sl = slice(s0, min(P, s0 + self.CHUNK))
            B = [ax.basis(xs[a][sl], self.idx[a]) for a, ax in enumerate(self.axes)]
            V = [b[0] for b in B]

            def prod(replace: dict):
                out = self.c
                for a in range(n):
                    out = out * replace.get(a, V[a])
                return out.sum(axis=-1).real

            value[sl] = prod({})
            for a in range(n):
                grad[sl, a] = prod({a: B[a][1]})
                hess[sl, a, a] = prod({a: B[a][2]})
                for b in range(a + 1, n):
                    h = prod({a: B[a][1], b: B[b][1]})
                    hess[sl, a, b] = h
                    hess[sl, b, a] = h
        return _reattach(X, value.reshape(shape), grad.reshape(shape + (n,)), hess.reshape(shape + (n, n)))


def _reattach(X, value, grad, hess):
    """Compose a jet in the coordinates with the (possibly non-trivial) input jets X."""
    # X are plain coordinate jets in practice; support general X via the chain rule.
    n = len(X)
    J = np.stack([x.grad for x in X], axis=-2)  # (..., n_in, n)
    if np.array_equal(J, np.broadcast_to(np.eye(n), J.shape)) and not any(np.any(x.hess) for x in X):
        return Jet2(value, grad, hess)
    g = np.einsum("...a,...ak->...k", grad, J)
    h = np.einsum("...ab,...ak,...bl->...kl", hess, J, J)
    for a in range(n):
        h = h + grad[..., a, None, None] * X[a].hess
    h = 0.5 * (h + np.swapaxes(h, -1, -2))
    return Jet2(value, g, h)


def spectral_lift(samples, periodic: Sequence[bool] | None = None, prune: float = 1e-15) -> ScalarField:
    """Trigonometric interpolant of samples on the lattice ``j / M`` per axis.

    Coefficients below ``prune`` times the largest one are dropped.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.ndim
    if periodic is not None and not all(periodic):
        raise UnsupportedDomainError("spectral_lift needs every axis periodic; use mixed_lift")
    if any(M < 4 for M in samples.shape):
        raise ValueError("need at least 4 samples per axis")
    C = np.fft.fftn(samples) / samples.size
    axes = []
    for a, M in enumerate(samples.shape):
        ax = _FourierAxis(M)
        C = ax.expand(C, a)
        axes.append(ax)
    ev = _TensorSeriesEvaluator(axes, C, prune)
    return ScalarField(ev, n, (True,) * n, name="spectral_lift")


def mixed_lift(samples, periodic: Sequence[bool], bounds: Sequence, prune: float = 1e-15) -> ScalarField:
    """Fourier interpolation on periodic axes, Chebyshev on the others.

    ``samples`` must be taken on :func:`mixed_lattice` with the same arguments.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.ndim
    if any(M < 4 for M in samples.shape):
        raise ValueError("need at least 4 samples per axis")
    C = samples.astype(complex)
    axes = []
    for a, M in enumerate(samples.shape):
        if periodic[a]:
            C = np.fft.fft(C, axis=a) / M
            ax = _FourierAxis(M)
            C = ax.expand(C, a)
        else:
            lo, hi = bounds[a]
            ax = _ChebyshevAxis(M, lo, hi)
            C = ax.coefficients(C, a)
        axes.append(ax)
    ev = _TensorSeriesEvaluator(axes, C, prune)
    return ScalarField(ev, n, tuple(bool(p) for p in periodic), name="mixed_lift")
