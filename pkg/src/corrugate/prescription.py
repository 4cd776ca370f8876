"""Scalar-curvature constructions on tori and thick tori by mixed corrugation.

Every construction perturbs a reference metric ``g0`` through two exponents
``h_2, h_3`` (components 1 and 2, 0-based) in a ``g0``-orthonormal frame:

    g = Q^T diag(1, exp(2 h_2), exp(2 h_3), 1, ...) Q = g0 + sum_r expm1(2 h_r) Q_r (x) Q_r

where ``Q = P^{-1}`` and the columns of ``P`` are the frame vectors.  The
exponents are produced by corrugating the zero map along axis 0 with loops
chosen so that the scalar-curvature relation holds up to ``O(1/N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .corrugation import CorrugationSpec, corrugate
from .curvature.backend import ricci_scalar
from .curvature.engine import check_metric
from .curvature.fields import MetricField, stack_metric_jets
from .grids import DEFAULT_CHUNK, TensorGrid
from .jets import DomainError, Jet2, ScalarField, _chain, coordinate_jets, jet_expm1, jet_sqrt
from .loops import TrigLoopFamily, mixed_lattice, mixed_lift, periodic_lattice, spectral_lift
from .semilinear import CheckedSigma, SemilinearRelation, assemble_jets

FRAME_TOL = 1e-10
PSI_STEP = 0.5
LIFT_SIZE = 16
FEASIBILITY_SIZE = 32
ROWS = (1, 2)


class InfeasibleError(ValueError):
    """The requested curvature drop cannot be realized by the construction."""


class FrameError(ValueError):
    """The frame field violates its orthonormality or first-row invariants."""


class GeometryError(ValueError):
    """A region does not fit inside the domain as required."""


# ---------------------------------------------------------------------------
# domain and inputs


@dataclass(frozen=True)
class DomainSpec:
    """``K x T^d`` with ``K`` a box over the leading ``n - d`` axes."""

    n: int
    d: int
    bounds: tuple = ()
    resolutions: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(tuple(float(v) for v in b) for b in self.bounds))
        if self.n < 3:
            raise ValueError("curvature constructions need n >= 3")
        if not 0 <= self.d <= self.n:
            raise ValueError("need 0 <= d <= n")
        if len(self.bounds) != self.n - self.d:
            raise ValueError("one (lo, hi) bound per non-periodic axis is required")
        if any(not lo < hi for lo, hi in self.bounds):
            raise ValueError("bounds must satisfy lo < hi")
        if self.resolutions is not None:
            object.__setattr__(self, "resolutions", tuple(int(r) for r in self.resolutions))
            if len(self.resolutions) != self.n:
                raise ValueError("one resolution per axis is required")

    @classmethod
    def torus(cls, n: int = 3, resolutions=None) -> "DomainSpec":
        return cls(n, n, (), resolutions)

    @classmethod
    def thick_torus(cls, n: int = 3, d: int = 2, margin: float = 0.1, resolutions=None) -> "DomainSpec":
        """``(-m, 1 + m) x (-m, m)^(n-d-1) x T^d``."""
        b = [(-margin, 1.0 + margin)] + [(-margin, margin)] * (n - d - 1)
        return cls(n, d, tuple(b[: n - d]), resolutions)

    @property
    def periodic(self) -> tuple:
        return (False,) * (self.n - self.d) + (True,) * self.d

    @property
    def axis_bounds(self) -> tuple:
        return self.bounds + (None,) * self.d

    def lattice(self, size: int = LIFT_SIZE) -> np.ndarray:
        sizes = [size] * self.n
        if self.d == self.n:
            return periodic_lattice(sizes)
        return mixed_lattice(sizes, self.periodic, self.axis_bounds)

    def lift(self, samples) -> ScalarField:
        if self.d == self.n:
            return spectral_lift(samples)
        return mixed_lift(samples, self.periodic, self.axis_bounds)

    def grid(self, sizes: Sequence[int] | None = None) -> TensorGrid:
        sizes = sizes if sizes is not None else self.resolutions
        if sizes is None:
            raise ValueError("no grid resolutions given")
        return TensorGrid.uniform(sizes, self.axis_bounds)


@dataclass(frozen=True)
class PrescriptionInput:
    g0: MetricField
    k: ScalarField
    epsilon: float
    N: int
    domain: DomainSpec

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.g0.n != self.domain.n or self.k.n != self.domain.n:
            raise ValueError("dimension mismatch between metric, target and domain")

    @property
    def epsilon_bar(self) -> float:
        return 0.5 * self.epsilon


# ---------------------------------------------------------------------------
# frames


def _is_zero(a) -> bool:
    return isinstance(a, float) and a == 0.0


def _inner(a, G, b):
    acc = 0.0
    for i, ai in enumerate(a):
        if _is_zero(ai):
            continue
        for k, bk in enumerate(b):
            if _is_zero(bk):
                continue
            acc = acc + ai * G[i][k] * bk
    return acc


def _gram_schmidt(G, sqrt: Callable):
    """Frame columns, ``Q = P^T G`` and ``alpha`` for a nested matrix ``G``.

    Works on numpy arrays or on jets.  ``e_2..e_n`` are orthonormalized first,
    so their 0-th components stay exactly zero; the first column completes the
    basis and its 0-th component is ``alpha = 1 / |v| > 0``.
    """
    n = len(G)
    cols = [None] * n
    for j in list(range(1, n)) + [0]:
        v = [1.0 if i == j else 0.0 for i in range(n)]
        for p in range(1, n):
            if cols[p] is None:
                continue
            c = _inner(v, G, cols[p])
            for i in range(n):
                if not _is_zero(cols[p][i]):
                    v[i] = v[i] - c * cols[p][i]
        inv = 1.0 / sqrt(_inner(v, G, v))
        cols[j] = [0.0 if _is_zero(vi) else vi * inv for vi in v]
    alpha = cols[0][0]
    P = [[cols[j][i] for j in range(n)] for i in range(n)]
    Q = [[_inner_row(P, G, j, k) for k in range(n)] for j in range(n)]
    return P, Q, alpha


def _inner_row(P, G, j, k):
    acc = 0.0
    for i in range(len(G)):
        if not _is_zero(P[i][j]):
            acc = acc + P[i][j] * G[i][k]
    return acc


def _fill_zeros(M, zero):
    return [[zero() if _is_zero(e) else e for e in row] for row in M]


@dataclass(frozen=True)
class FrameValues:
    P: np.ndarray
    Q: np.ndarray
    alpha: np.ndarray


def gram_schmidt_frame(g0, x=None) -> FrameValues:
    """``g0``-orthonormal frame with first row ``(alpha, 0, ..., 0)``.

    ``g0`` is a :class:`MetricField` evaluated at ``x``, or an array of SPD
    matrices (``x`` omitted).
    """
    g = g0.values(x) if isinstance(g0, MetricField) else np.asarray(g0, dtype=float)
    check_metric(g)
    n = g.shape[-1]
    G = [[g[..., i, k] for k in range(n)] for i in range(n)]
    P, Q, alpha = _gram_schmidt(G, np.sqrt)
    zero = lambda: np.zeros(g.shape[:-2])  # noqa: E731
    P = np.stack([np.stack(r, -1) for r in _fill_zeros(P, zero)], -2)
    Q = np.stack([np.stack(r, -1) for r in _fill_zeros(Q, zero)], -2)
    return FrameValues(P, Q, np.asarray(alpha))


def frame_defects(g: np.ndarray, P: np.ndarray) -> tuple:
    """Max deviation of ``P^T g P`` from the identity and of the first row from ``(alpha, 0..)``."""
    n = g.shape[-1]
    orth = np.abs(np.swapaxes(P, -1, -2) @ g @ P - np.eye(n)).max()
    row = max(np.abs(P[..., 0, 1:]).max(initial=0.0), float(np.maximum(-P[..., 0, 0], 0.0).max()))
    if np.any(P[..., 0, 0] <= 0.0):
        row = max(row, 1.0)
    return float(orth), float(row)


class FrameField:
    """Frame of a metric field with entries as jet-evaluable fields."""

    def __init__(self, g0: MetricField):
        self.g0 = g0
        self.n = g0.n
        per = g0.periodic
        self.P = [[ScalarField(self._getter("P", i, j), self.n, per) for j in range(self.n)] for i in range(self.n)]
        self.Q = [[ScalarField(self._getter("Q", i, j), self.n, per) for j in range(self.n)] for i in range(self.n)]
        self.alpha = ScalarField(self._getter("alpha"), self.n, per, name="alpha")

    def _getter(self, name, i=None, j=None):
        def fn(X, cache):
            out = self.jets(X, cache)[name]
            return out if i is None else out[i][j]
        return fn

    def jets(self, X: tuple, cache: dict) -> dict:
        key = ("frame", id(self))
        hit = cache.get(key)
        if hit is not None:
            return hit[1]
        G = self.g0._eval(X, cache)
        check_metric(stack_metric_jets(G).g)
        P, Q, alpha = _gram_schmidt(G, jet_sqrt)
        zero = lambda: Jet2.constant(0.0, self.n, X[0].shape)  # noqa: E731
        out = {"P": _fill_zeros(P, zero), "Q": _fill_zeros(Q, zero), "alpha": alpha}
        cache[key] = (self, out)
        return out

    def values(self, points) -> FrameValues:
        X = coordinate_jets(points, self.n)
        J = self.jets(X, {})
        P = np.stack([np.stack([e.value for e in r], -1) for r in J["P"]], -2)
        Q = np.stack([np.stack([e.value for e in r], -1) for r in J["Q"]], -2)
        return FrameValues(P, Q, J["alpha"].value)

    def defects(self, points) -> tuple:
        return frame_defects(self.g0.values(points), self.values(points).P)


# ---------------------------------------------------------------------------
# perturbed metrics and Psi coefficients


def perturbed_metric_jets(G, Q, H: dict) -> list:
    """``G + sum_r expm1(2 H_r) Q_r (x) Q_r`` for jets ``H_r`` keyed by row."""
    n = len(G)
    E = {r: jet_expm1(h * 2.0) for r, h in H.items()}
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            acc = G[i][j]
            for r, e in E.items():
                acc = acc + e * (Q[r][i] * Q[r][j])
            out[i][j] = out[j][i] = acc
    return out


def _scalar(M) -> np.ndarray:
    return ricci_scalar(stack_metric_jets(M))[1]


def _first_derivative_scan(g0: MetricField, frame: FrameField, x, u: float):
    """Scalar-curvature shifts for ``d_0 h_r = +-u`` with every other jet entry zero."""
    pts = np.asarray(x, dtype=float)
    X = coordinate_jets(pts, g0.n)
    cache: dict = {}
    G = g0._eval(X, cache)
    J = frame.jets(X, cache)
    P = np.stack([np.stack([e.value for e in r], -1) for r in J["P"]], -2)
    orth, row = frame_defects(stack_metric_jets(G).g, P)
    if max(orth, row) > FRAME_TOL:
        raise FrameError(f"frame invariants violated ({orth:.2e}, {row:.2e})")
    base = _scalar(G)
    shape = pts.shape[:-1]
    n = g0.n
    out = {}
    for r in ROWS:
        for sgn in (1.0, -1.0):
            grad = np.zeros(shape + (n,))
            grad[..., 0] = sgn * u
            h = Jet2(np.zeros(shape), grad, np.zeros(shape + (n, n)))
            out[(r, sgn)] = _scalar(perturbed_metric_jets(G, J["Q"], {r: h})) - base
    return out, J["alpha"].value


def extract_psi(g0: MetricField, frame: FrameField, x, u: float = PSI_STEP) -> tuple:
    """Coefficients of ``d_0 h_2`` and ``d_0 h_3`` in the scalar-curvature shift.

    The shift is a quadratic polynomial in the first derivatives, so the odd
    difference quotient is exact up to rounding for any step ``u``.
    """
    S, _ = _first_derivative_scan(g0, frame, x, u)
    return tuple((S[(r, 1.0)] - S[(r, -1.0)]) / (2 * u) for r in ROWS)


def psi_quadratic(g0: MetricField, frame: FrameField, x, u: float = PSI_STEP) -> tuple:
    """Quadratic coefficients (expected ``-2 alpha^2``) and ``alpha`` at ``x``."""
    S, alpha = _first_derivative_scan(g0, frame, x, u)
    return tuple((S[(r, 1.0)] + S[(r, -1.0)]) / (2 * u * u) for r in ROWS), alpha


def lift_psi(g0: MetricField, frame: FrameField, domain: DomainSpec, size: int = LIFT_SIZE) -> tuple:
    """Sample the Psi coefficients on the domain lattice and lift them to fields."""
    lat = domain.lattice(size)
    psi2, psi3 = extract_psi(g0, frame, lat.reshape(-1, domain.n))
    shape = lat.shape[:-1]
    return domain.lift(psi2.reshape(shape)), domain.lift(psi3.reshape(shape))


# ---------------------------------------------------------------------------
# relations


def flat_relation(k: ScalarField, epsilon_bar: float) -> SemilinearRelation:
    """Closed-form relation ``Scal(diag(1, e^2h2, e^2h3, 1..)) + k + epsilon_bar`` on flat space."""
    n = k.n
    two = ScalarField.constant(-2.0, n)

    def R(s0, cs: CheckedSigma, s1, s1star):
        a, b = s1[..., 0], s1[..., 1]
        h2, h3 = cs.value[..., 0], cs.value[..., 1]
        d = lambda i, r: cs.first_rest[..., i - 1, r]  # noqa: E731
        idx = {p: q for q, p in enumerate((i, j) for i in range(1, n) for j in range(i, n))}
        dd = lambda i, r: cs.second_rest[..., idx[(i, i)], r]  # noqa: E731
        out = -2.0 * (a * a + b * b + a * b)
        out = out - 2.0 * np.exp(-2 * h2) * (dd(1, 1) - d(1, 0) * d(1, 1) + d(1, 1) ** 2)
        out = out - 2.0 * np.exp(-2 * h3) * (dd(2, 0) - d(2, 1) * d(2, 0) + d(2, 0) ** 2)
        for i in range(3, n):
            out = out - 2.0 * (dd(i, 0) + dd(i, 1) + d(i, 0) ** 2 + d(i, 1) ** 2 + d(i, 0) * d(i, 1))
        return out + k.value(s0) + epsilon_bar

    return SemilinearRelation((two, two), R, epsilon_bar, kind="curvature", name="flat")


def curvature_relation(g0: MetricField, frame: FrameField, target: ScalarField,
                       epsilon: float) -> SemilinearRelation:
    """``Scal(g) - Scal(g0) + target`` with ``g`` the frame perturbation by ``(h_2, h_3)``.

    The coefficient of ``d_00 h_r`` is ``-2 alpha^2`` for every jet, so ``R`` is
    the same curvature difference evaluated with ``d_00 h = 0``.
    """
    L = frame.alpha.square() * -2.0

    def R(s0, cs: CheckedSigma, s1, s1star):
        X = coordinate_jets(s0, g0.n)
        cache: dict = {}
        G = g0._eval(X, cache)
        Q = frame.jets(X, cache)["Q"]
        h = assemble_jets(s0, cs, s1, s1star)
        g = perturbed_metric_jets(G, Q, {ROWS[0]: h[0], ROWS[1]: h[1]})
        return _scalar(g) - _scalar(G) + target._eval(X, cache).value

    return SemilinearRelation((L, L), R, epsilon, kind="curvature", name="curvature")


# ---------------------------------------------------------------------------
# constructions


@dataclass(frozen=True)
class Construction:
    metric: MetricField
    reference: MetricField
    relation: SemilinearRelation
    base: tuple
    gamma: TrigLoopFamily
    delta: TrigLoopFamily
    fields: tuple
    N: int
    frame: FrameField | None = None
    psi: tuple | None = None
    extras: dict = field(default_factory=dict)

    def sigma_fields(self) -> tuple:
        return self.fields


def _sample_min(f: ScalarField, domain: DomainSpec, size: int = FEASIBILITY_SIZE) -> float:
    if f.const is not None:
        return f.const
    lat = domain.lattice(size).reshape(-1, domain.n)
    return float(f.value(lat).min())


def check_feasibility(k: ScalarField, epsilon_bar: float, domain: DomainSpec) -> float:
    """Refuse targets with ``min(k) + epsilon_bar < 0`` (sampled on a lattice)."""
    lo = _sample_min(k, domain) + epsilon_bar
    if lo < 0.0:
        raise InfeasibleError(f"min(k) + epsilon/2 = {lo:.3e} < 0: curvature can only be lowered")
    return lo


def _curvature_loops(n: int, amp: ScalarField, alpha: ScalarField | None, psi_diff: ScalarField | None):
    """``gamma = (c, -c) cos 2pi t``, ``delta_1 = -c^2/2 cos 4pi t + psi_diff/(2 alpha^2) c cos 2pi t``."""
    c = amp if alpha is None else amp / alpha
    gamma = TrigLoopFamily(n, [None, None], cos=[[c], [-c]])
    mode2 = c.square() * -0.5
    mode1 = None
    if psi_diff is not None:
        mode1 = psi_diff / (alpha.square() * 2.0) * c
    delta = TrigLoopFamily(n, [None, None], cos=[[mode1, mode2], []])
    return gamma, delta


def _corrugate_zero(n: int, gamma, delta, N: int, periodic) -> tuple:
    zero = ScalarField.constant(0.0, n, periodic)
    spec = CorrugationSpec((zero, zero), gamma, delta, 0, N)
    return spec.base, tuple(corrugate(spec))


def _frame_metric(g0: MetricField, frame: FrameField, F: Sequence[ScalarField]) -> MetricField:
    def fn(X, cache):
        G = g0._eval(X, cache)
        Q = frame.jets(X, cache)["Q"]
        return perturbed_metric_jets(G, Q, {r: f._eval(X, cache) for r, f in zip(ROWS, F)})

    return MetricField(fn, g0.n, g0.periodic)


def flat_torus_construction(inp: PrescriptionInput) -> Construction:
    n = inp.domain.n
    eb = inp.epsilon_bar
    check_feasibility(inp.k, eb, inp.domain)
    target = inp.k + eb
    gamma, delta = _curvature_loops(n, target.sqrt(), None, None)
    base, F = _corrugate_zero(n, gamma, delta, inp.N, inp.domain.periodic)
    E = [f * 2.0 for f in F]
    E = [e.exp() for e in E]
    one, zero = ScalarField.constant(1.0, n), ScalarField.constant(0.0, n)
    entries = [[zero] * n for _ in range(n)]
    for i in range(n):
        entries[i][i] = one
    entries[1][1], entries[2][2] = E
    metric = MetricField.from_entries(entries, n, inp.domain.periodic)
    return Construction(metric, MetricField.identity(n, inp.domain.periodic), flat_relation(inp.k, eb),
                        base, gamma, delta, F, inp.N)


def flat_torus_metric(inp: PrescriptionInput) -> MetricField:
    return flat_torus_construction(inp).metric


def _framed_construction(g0: MetricField, domain: DomainSpec, amp: ScalarField, target: ScalarField,
                         epsilon: float, N: int, lift_size: int) -> Construction:
    n = domain.n
    frame = FrameField(g0)
    psi2, psi3 = lift_psi(g0, frame, domain, lift_size)
    gamma, delta = _curvature_loops(n, amp, frame.alpha, psi2 - psi3)
    base, F = _corrugate_zero(n, gamma, delta, N, domain.periodic)
    metric = _frame_metric(g0, frame, F)
    rel = curvature_relation(g0, frame, target, epsilon)
    return Construction(metric, g0, rel, base, gamma, delta, F, N, frame, (psi2, psi3))


def general_torus_construction(inp: PrescriptionInput, lift_size: int = LIFT_SIZE) -> Construction:
    eb = inp.epsilon_bar
    check_feasibility(inp.k, eb, inp.domain)
    target = inp.k + eb
    return _framed_construction(inp.g0, inp.domain, target.sqrt(), target, eb, inp.N, lift_size)


def general_torus_metric(inp: PrescriptionInput) -> MetricField:
    return general_torus_construction(inp).metric


def thick_torus_construction(h0: MetricField, s: ScalarField, nu: float, N: int, domain: DomainSpec,
                             h: MetricField | None = None, C=None, lift_size: int = LIFT_SIZE) -> Construction:
    """Lower the scalar curvature by ``s^2`` where ``s > 0``; leave ``h0`` untouched where ``s = 0``."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    if _sample_min(s, domain) < 0.0:
        raise DomainError("the amplitude s must be nonnegative")
    c = _framed_construction(h0, domain, s, s.square(), nu, N, lift_size)
    c.extras.update({"reference_norm": h if h is not None else h0, "region": C, "nu": nu, "s": s})
    return c


def thick_torus_metric(h: MetricField, h0: MetricField, s: ScalarField, nu: float, C, domain: DomainSpec,
                       N: int) -> MetricField:
    return thick_torus_construction(h0, s, nu, N, domain, h, C).metric


# ---------------------------------------------------------------------------
# bumps and measurements


def _smoothstep_derivs(t: np.ndarray):
    """``psi(t) = e(t) / (e(t) + e(1 - t))`` with ``e(t) = exp(-1/t)`` for ``t > 0``, else 0."""

    def e(s):
        s_safe = np.maximum(s, 1e-3)
        v = np.where(s > 1e-3, np.exp(-1.0 / s_safe), 0.0)
        return v, v / s_safe ** 2, v * (1.0 / s_safe ** 4 - 2.0 / s_safe ** 3)

    a, a1, a2 = e(t)
    b, b1, b2 = e(1.0 - t)
    b1 = -b1
    s = a + b
    num = a1 * b - a * b1
    f0 = a / s
    f1 = num / s ** 2
    f2 = (a2 * b - a * b2) / s ** 2 - 2.0 * num * (a1 + b1) / s ** 3
    return f0, f1, f2


def _smoothstep_field(x: ScalarField) -> ScalarField:
    def fn(X, cache):
        J = x._eval(X, cache)
        f0, f1, f2 = _smoothstep_derivs(J.value)
        return _chain(J, f0, f1, f2)

    return ScalarField(fn, x.n, x.periodic)


def bump_field(plateau: Sequence, margin: float, domain: DomainSpec) -> ScalarField:
    """Smooth bump equal to 1 on ``plateau`` and 0 outside its ``margin``-neighbourhood.

    ``plateau[a]`` is ``(lo, hi)`` or ``None`` (no constraint along axis ``a``).
    On periodic axes the support must stay inside ``(0, 1)``.
    """
    n = domain.n
    if len(plateau) != n or not margin > 0:
        raise GeometryError("need one plateau entry per axis and a positive margin")
    out = ScalarField.constant(1.0, n, domain.periodic)
    for a, iv in enumerate(plateau):
        if iv is None:
            continue
        lo, hi = iv
        b = domain.axis_bounds[a] or (0.0, 1.0)
        if not (b[0] < lo - margin and hi + margin < b[1] and lo <= hi):
            raise GeometryError(f"plateau plus margin leaves the domain interior along axis {a}")
        xa = ScalarField.coordinate(a, n, domain.periodic)
        up = _smoothstep_field((xa - (lo - margin)) * (1.0 / margin))
        down = _smoothstep_field(((hi + margin) - xa) * (1.0 / margin))
        out = out * up * down
    return out


def c0_distance_g(gA: MetricField, gB: MetricField, gRef: MetricField, grid: TensorGrid,
                  chunk: int = DEFAULT_CHUNK) -> float:
    """Sup over the grid of the largest |eigenvalue| of ``gRef^{-1} (gA - gB)``."""
    worst = 0.0
    for pts in grid.chunks(chunk):
        ref = gRef.values(pts)
        check_metric(ref)
        Lc = np.linalg.cholesky(ref)
        Li = np.linalg.inv(Lc)
        D = gA.values(pts) - gB.values(pts)
        S = Li @ D @ np.swapaxes(Li, -1, -2)
        S = 0.5 * (S + np.swapaxes(S, -1, -2))
        worst = max(worst, float(np.abs(np.linalg.eigvalsh(S)).max()))
    return worst


@dataclass(frozen=True)
class BandReport:
    """Curvature shift ``Scal(g) - Scal(g0)`` against a pointwise open band."""

    inside: bool
    margin: float
    min_shift: float
    max_shift: float
    deviation: float
    points: int


def band_check(metric: MetricField, reference: MetricField, lower: Callable, upper: Callable, grid: TensorGrid,
               chunk: int = DEFAULT_CHUNK, reference_flat: bool = False) -> BandReport:
    """``lower(pts) < Scal(metric) - Scal(reference) < upper(pts)`` at every grid point.

    ``deviation`` is the sup distance of the shift from the band centre.
    """
    margin = math.inf
    dev = 0.0
    lo_s, hi_s = math.inf, -math.inf
    for pts in grid.chunks(chunk):
        s = metric.scalar_curvature(pts)
        if not reference_flat:
            s = s - reference.scalar_curvature(pts)
        lo, hi = lower(pts), upper(pts)
        margin = min(margin, float(np.min(s - lo)), float(np.min(hi - s)))
        dev = max(dev, float(np.max(np.abs(s - 0.5 * (lo + hi)))))
        lo_s, hi_s = min(lo_s, float(s.min())), max(hi_s, float(s.max()))
    return BandReport(margin > 0.0, margin, lo_s, hi_s, dev, grid.size)
