"""Second-order forward jets and scalar fields built on them.

A :class:`Jet2` carries value, gradient and Hessian of a scalar quantity over a
batch of points.  All arrays share a leading batch shape ``B``; the gradient has
shape ``B + (n,)`` and the Hessian ``B + (n, n)``.  Every operation is written so
that the Hessian stays exactly symmetric (the rank-one update terms are formed
with commutative products only).

A :class:`ScalarField` is an expression over coordinate jets.  Evaluating it at
an array of points returns the exact 2-jet of the expression.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

DIV_GUARD = 1e-14


class SingularFieldError(ArithmeticError):
    """Division by a jet whose value is (numerically) zero."""


class DomainError(ValueError):
    """Elementary function evaluated outside its domain."""


class Jet2:
    """Batched order-2 jet (value, gradient, symmetric Hessian)."""

    __slots__ = ("value", "grad", "hess")
    __array_priority__ = 100  # make numpy defer to our reflected operators

    def __init__(self, value, grad, hess):
        self.value = np.asarray(value, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @property
    def n(self) -> int:
        return self.grad.shape[-1]

    @property
    def shape(self) -> tuple:
        return self.value.shape

    @classmethod
    def constant(cls, c, n: int, shape=()) -> "Jet2":
        value = np.broadcast_to(np.asarray(c, dtype=float), shape).copy()
        return cls(value, np.zeros(shape + (n,)), np.zeros(shape + (n, n)))

    @classmethod
    def variable(cls, x, i: int, n: int) -> "Jet2":
        """Jet of the coordinate function ``x -> x_i`` at the values ``x``."""
        x = np.asarray(x, dtype=float)
        grad = np.zeros(x.shape + (n,))
        grad[..., i] = 1.0
        return cls(x.copy(), grad, np.zeros(x.shape + (n, n)))

    def copy(self) -> "Jet2":
        return Jet2(self.value.copy(), self.grad.copy(), self.hess.copy())

    def __getitem__(self, idx) -> "Jet2":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet2(self.value[idx], self.grad[idx], self.hess[idx])

    def __repr__(self) -> str:
        return f"Jet2(shape={self.shape}, n={self.n})"

    # arithmetic -----------------------------------------------------------
    def _lift(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other, self.n, np.broadcast_shapes(self.shape, np.shape(other)))

    def __add__(self, other):
        if isinstance(other, Jet2):
            return jet_add(self, other)
        c = np.asarray(other, dtype=float)
        return Jet2(self.value + c, _bcast(self.grad, c.shape, 1), _bcast(self.hess, c.shape, 2))

    __radd__ = __add__

    def __neg__(self):
        return jet_neg(self)

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return jet_add(self, jet_neg(other))
        return self + (-np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return jet_neg(self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return jet_mul(self, other)
        c = np.asarray(other, dtype=float)
        return Jet2(self.value * c, self.grad * c[..., None], self.hess * c[..., None, None])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return jet_div(self, other)
        c = np.asarray(other, dtype=float)
        if np.any(np.abs(c) < DIV_GUARD):
            raise SingularFieldError("division by a value below the guard threshold")
        return self * (1.0 / c)

    def __rtruediv__(self, other):
        return jet_div(self._lift(other), self)

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise TypeError("only non-negative integer powers are supported")
        if k == 0:
            return Jet2.constant(1.0, self.n, self.shape)
        out = self
        for _ in range(k - 1):
            out = jet_mul(out, self)
        return out


def _bcast(arr, shape, extra):
    target = np.broadcast_shapes(arr.shape[: arr.ndim - extra], shape) + arr.shape[arr.ndim - extra:]
    return np.broadcast_to(arr, target).copy() if target != arr.shape else arr.copy()


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


def jet_add(a: Jet2, b: Jet2) -> Jet2:
    return Jet2(a.value + b.value, a.grad + b.grad, a.hess + b.hess)


def jet_neg(a: Jet2) -> Jet2:
    return Jet2(-a.value, -a.grad, -a.hess)


def jet_mul(a: Jet2, b: Jet2) -> Jet2:
    av = a.value[..., None]
    bv = b.value[..., None]
    grad = av * b.grad + bv * a.grad
    hess = av[..., None] * b.hess + bv[..., None] * a.hess + (_outer(a.grad, b.grad) + _outer(b.grad, a.grad))
    return Jet2(a.value * b.value, grad, hess)


def _chain(a: Jet2, f0, f1, f2) -> Jet2:
    """Apply a scalar function with derivatives f0, f1, f2 (evaluated at a.value)."""
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    grad = f1[..., None] * a.grad
    hess = f1[..., None, None] * a.hess + f2[..., None, None] * _outer(a.grad, a.grad)
    return Jet2(f0, grad, hess)


def jet_reciprocal(a: Jet2) -> Jet2:
    if np.any(np.abs(a.value) < DIV_GUARD):
        raise SingularFieldError("division by a value below the guard threshold")
    r = 1.0 / a.value
    return _chain(a, r, -r * r, 2.0 * r * r * r)


def jet_div(a: Jet2, b: Jet2) -> Jet2:
    return jet_mul(a, jet_reciprocal(b))


def jet_exp(a: Jet2) -> Jet2:
    e = np.exp(a.value)
    return _chain(a, e, e, e)


def jet_expm1(a: Jet2) -> Jet2:
    """exp(a) - 1, accurate (and exactly zero) for zero input."""
    e = np.exp(a.value)
    return _chain(a, np.expm1(a.value), e, e)


def jet_sqrt(a: Jet2) -> Jet2:
    if np.any(a.value <= 0.0):
        raise DomainError("sqrt of a non-positive jet")
    s = np.sqrt(a.value)
    return _chain(a, s, 0.5 / s, -0.25 / (s * a.value))


def jet_log(a: Jet2) -> Jet2:
    if np.any(a.value <= 0.0):
        raise DomainError("log of a non-positive jet")
    r = 1.0 / a.value
    return _chain(a, np.log(a.value), r, -r * r)


def jet_sin(a: Jet2) -> Jet2:
    s, c = np.sin(a.value), np.cos(a.value)
    return _chain(a, s, c, -s)


def jet_cos(a: Jet2) -> Jet2:
    s, c = np.sin(a.value), np.cos(a.value)
    return _chain(a, c, -s, -c)


def jet_square(a: Jet2) -> Jet2:
    return _chain(a, a.value * a.value, 2.0 * a.value, np.full_like(a.value, 2.0))


# ---------------------------------------------------------------------------
# scalar fields


Evaluator = Callable[[tuple, dict], "Jet2 | float"]


class ScalarField:
    """Pure expression over the coordinates of an ``n``-dimensional domain.

    ``fn(X, cache)`` receives the tuple of coordinate jets and an evaluation cache
    shared by all sub-fields evaluated at the same points.  ``periodic`` marks the
    axes along which the field is 1-periodic; ``const`` is set for fields known to
    be constant, which lets downstream code skip work and take exact shortcuts.
    """

    __slots__ = ("_fn", "n", "periodic", "const", "name")

    def __init__(self, fn: Evaluator, n: int, periodic: Sequence[bool] | None = None,
                 const: float | None = None, name: str | None = None):
        self._fn = fn
        self.n = int(n)
        self.periodic = tuple(bool(p) for p in periodic) if periodic is not None else (True,) * self.n
        if len(self.periodic) != self.n:
            raise ValueError("periodicity mask length must equal the dimension")
        self.const = None if const is None else float(const)
        self.name = name

    # construction ---------------------------------------------------------
    @classmethod
    def from_function(cls, expr: Callable[[tuple], "Jet2 | float"], n: int,
                      periodic: Sequence[bool] | None = None, name: str | None = None) -> "ScalarField":
        """Wrap ``expr(x)`` where ``x`` is the tuple of coordinate jets."""
        return cls(lambda X, cache: expr(X), n, periodic, name=name)

    @classmethod
    def constant(cls, c: float, n: int, periodic: Sequence[bool] | None = None) -> "ScalarField":
        c = float(c)
        return cls(lambda X, cache: c, n, periodic, const=c, name=repr(c))

    @classmethod
    def coordinate(cls, i: int, n: int, periodic: Sequence[bool] | None = None) -> "ScalarField":
        return cls(lambda X, cache: X[i], n, periodic, name=f"x{i}")

    # evaluation -----------------------------------------------------------
    def _eval(self, X: tuple, cache: dict) -> Jet2:
        key = id(self)
        hit = cache.get(key)
        if hit is not None:
            return hit[1]
        out = self._fn(X, cache)
        if not isinstance(out, Jet2):
            out = Jet2.constant(out, self.n, X[0].shape)
        # keep a reference to self so ids stay unique during the evaluation
        cache[key] = (self, out)
        return out

    def jet(self, points) -> Jet2:
        X = coordinate_jets(points, self.n)
        return self._eval(X, {})

    __call__ = jet

    def value(self, points) -> np.ndarray:
        return self.jet(points).value

    # algebra --------------------------------------------------------------
    def _combine(self, other, op, cop) -> "ScalarField":
        if isinstance(other, ScalarField):
            if other.n != self.n:
                raise ValueError("dimension mismatch")
            per = tuple(a and b for a, b in zip(self.periodic, other.periodic))
            const = None
            if self.const is not None and other.const is not None:
                const = cop(self.const, other.const)
            if const is not None:
                return ScalarField.constant(const, self.n, per)
            return ScalarField(lambda X, c: op(self._eval(X, c), other._eval(X, c)), self.n, per)
        c = float(other)
        if self.const is not None:
            return ScalarField.constant(cop(self.const, c), self.n, self.periodic)
        return ScalarField(lambda X, cache: op(self._eval(X, cache), c), self.n, self.periodic)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarField) and other.const is not None and abs(other.const) < DIV_GUARD:
            raise SingularFieldError("division by a zero constant field")
        return self._combine(other, lambda a, b: a / b, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return ScalarField.constant(other, self.n, self.periodic) / self

    def __neg__(self):
        if self.const is not None:
            return ScalarField.constant(-self.const, self.n, self.periodic)
        return ScalarField(lambda X, c: -self._eval(X, c), self.n, self.periodic)

    def map(self, fn: Callable[[Jet2], Jet2], scalar_fn: Callable[[float], float] | None = None) -> "ScalarField":
        """Compose with an elementary jet function."""
        if self.const is not None and scalar_fn is not None:
            return ScalarField.constant(scalar_fn(self.const), self.n, self.periodic)
        return ScalarField(lambda X, c: fn(self._eval(X, c)), self.n, self.periodic)

    def exp(self):
        return self.map(jet_exp, math.exp)

    def expm1(self):
        return self.map(jet_expm1, math.expm1)

    def sin(self):
        return self.map(jet_sin, math.sin)

    def cos(self):
        return self.map(jet_cos, math.cos)

    def square(self):
        return self.map(jet_square, lambda v: v * v)

    def sqrt(self):
        if self.const is not None:
            if self.const < 0.0:
                raise DomainError("sqrt of a negative constant field")
            return ScalarField.constant(math.sqrt(self.const), self.n, self.periodic)
        return self.map(jet_sqrt)


def coordinate_jets(points, n: int) -> tuple:
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != n:
        raise ValueError(f"points must have trailing dimension {n}, got {pts.shape}")
    return tuple(Jet2.variable(pts[..., i], i, n) for i in range(n))


def evaluate_fields(fields: Sequence[ScalarField], points) -> list:
    """Evaluate several fields at the same points sharing one cache."""
    n = fields[0].n
    X = coordinate_jets(points, n)
    cache: dict = {}
    return [f._eval(X, cache) for f in fields]
