import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrugate.curvature.oracle import fd_gradient
from corrugate.jets import (DomainError, Jet2, ScalarField, SingularFieldError, coordinate_jets, jet_div, jet_exp,
                            jet_mul, jet_sqrt)

coords = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def test_square_of_identity_jet():
    x = Jet2.variable(np.array(3.0), 0, 1)
    y = jet_mul(x, x)
    assert y.value == 9.0
    assert y.grad[0] == 6.0
    assert y.hess[0, 0] == 2.0


def test_multiplying_by_constant_one_is_identity():
    x = coordinate_jets(np.array([[0.3, -0.7]]), 2)
    j = x[0] * x[1] + x[1]
    k = jet_mul(j, Jet2.constant(1.0, 2, j.shape))
    for a, b in ((j.value, k.value), (j.grad, k.grad), (j.hess, k.hess)):
        assert np.array_equal(a, b)


def test_elementary_constants():
    z = Jet2.constant(0.0, 3)
    e = jet_exp(z)
    assert e.value == 1.0 and not e.grad.any() and not e.hess.any()
    s = jet_sqrt(Jet2.constant(4.0, 3))
    assert s.value == 2.0 and not s.grad.any() and not s.hess.any()


def test_div_of_cubics_matches_finite_differences():
    rng = np.random.default_rng(3)
    p, q = rng.normal(size=4), rng.normal(size=4) + np.array([3.0, 0, 0, 0])

    def cubic(c):
        return ScalarField.from_function(lambda X: c[0] + c[1] * X[0] + c[2] * X[0] ** 2 + c[3] * X[0] ** 3, 1)

    f = cubic(p) / cubic(q)
    x = np.array([[0.7]])
    j = f.jet(x)
    g, H = fd_gradient(f.value, x, 1e-4)
    assert np.abs(j.grad - g).max() < 1e-6
    assert np.abs(j.hess - H).max() < 1e-6


@settings(max_examples=50, deadline=None)
@given(st.tuples(coords, coords, coords))
def test_exp_sin_composite_matches_finite_differences(p):
    X = (ScalarField.coordinate(0, 3) * 1.3 + ScalarField.coordinate(1, 3) * ScalarField.coordinate(2, 3))
    f = X.sin().exp() + X.cos() * ScalarField.coordinate(0, 3)
    x = np.array([p])
    j = f.jet(x)
    g, H = fd_gradient(f.value, x, 1e-3)
    assert np.abs(j.grad - g).max() < 1e-6
    assert np.abs(j.hess - H).max() < 1e-6


@settings(max_examples=50, deadline=None)
@given(st.lists(coords, min_size=3, max_size=3))
def test_hessian_is_bit_exactly_symmetric(p):
    x = [ScalarField.coordinate(i, 3) for i in range(3)]
    f = (x[0] * x[1] + x[2]).sin() * (x[1] - x[2] * x[0]).exp() / (x[0] * x[0] + 2.0)
    h = f.jet(np.array([p])).hess
    assert np.array_equal(h, np.swapaxes(h, -1, -2))


def test_periodic_translation_agrees():
    x = [ScalarField.coordinate(i, 2) for i in range(2)]
    f = (x[0] * (2 * math.pi)).sin() * (x[1] * (4 * math.pi)).cos() + 0.5
    p = np.random.default_rng(0).random((100, 2))
    a, b = f.jet(p), f.jet(p + np.array([1.0, 0.0]))
    for u, v in ((a.value, b.value), (a.grad, b.grad), (a.hess, b.hess)):
        assert np.abs(u - v).max() < 1e-12


def test_pure_evaluation_is_repeatable():
    f = ScalarField.coordinate(0, 2).exp() * ScalarField.coordinate(1, 2)
    p = np.array([[0.1, 0.2], [0.3, 0.4]])
    a, b = f.jet(p), f.jet(p)
    assert np.array_equal(a.value, b.value) and np.array_equal(a.hess, b.hess)


def test_domain_and_singular_errors():
    with pytest.raises(DomainError):
        jet_sqrt(Jet2.constant(-1.0, 2))
    with pytest.raises(DomainError):
        ScalarField.constant(-1.0, 2).sqrt()
    with pytest.raises(SingularFieldError):
        jet_div(Jet2.constant(1.0, 2), Jet2.constant(0.0, 2))
    with pytest.raises(SingularFieldError):
        ScalarField.constant(1.0, 2) / ScalarField.constant(0.0, 2)


def test_sqrt_of_zero_constant_field_is_exact():
    z = ScalarField.constant(0.0, 3).sqrt()
    assert z.const == 0.0
    j = z.jet(np.zeros((2, 3)))
    assert not j.value.any() and not j.grad.any()
