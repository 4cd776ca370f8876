import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrugate.jets import ScalarField, coordinate_jets
from corrugate.loops import (TrigLoopFamily, UnsupportedDomainError, eval_loop_jet, int_loop, loop_mean,
                             mixed_lattice, mixed_lift, periodic_lattice, spectral_lift)

TWO_PI = 2 * math.pi


def _values(loop, x, t):
    return eval_loop_jet(loop, x, t)[0]


def test_int_of_constant_loop_vanishes():
    g = TrigLoopFamily(2, [3.0])
    I = int_loop(g)
    assert I.is_zero()


def test_int_of_cosine_is_sine_over_two_pi():
    g = TrigLoopFamily(1, [None], cos=[[1.0]])
    t = np.linspace(0, 1, 17)
    x = np.zeros((17, 1))
    assert np.abs(_values(int_loop(g), x, t)[..., 0] - np.sin(TWO_PI * t) / TWO_PI).max() < 1e-15


def test_double_int_of_cosine_against_quadrature():
    g = TrigLoopFamily(1, [None], cos=[[1.0]])
    t = np.array([0.0, 0.25, 0.5])
    got = _values(int_loop(int_loop(g)), np.zeros((3, 1)), t)[..., 0]
    # primitive of sin(2 pi s)/(2 pi) from 0 to t, by composite Simpson
    s = np.linspace(0, 1, 2001)
    quad = []
    for tt in t:
        u = s * tt
        w = np.sin(TWO_PI * u) / TWO_PI
        quad.append(tt / 6000 * (w[0] + w[-1] + 4 * w[1:-1:2].sum() + 2 * w[2:-1:2].sum()))
    quad = np.array(quad)
    closed = (1 - np.cos(TWO_PI * t)) / (4 * math.pi ** 2)
    assert np.abs(got - closed).max() < 1e-15
    assert np.abs(got - quad).max() < 1e-10


def test_loop_means():
    x = np.array([[0.25, 0.0]])
    assert loop_mean(TrigLoopFamily(2, [None], cos=[[1.0]]), x)[0, 0] == 0.0
    assert loop_mean(TrigLoopFamily(2, [2.5]), x)[0, 0] == 2.5
    k = 2.0 + (ScalarField.coordinate(0, 2) * TWO_PI).sin()
    assert loop_mean(TrigLoopFamily(2, [k]), x)[0, 0] == pytest.approx(3.0, abs=1e-15)


def test_spatial_jets_and_t_derivative():
    x1 = ScalarField.coordinate(0, 2)
    g = TrigLoopFamily(2, [None], cos=[[x1 * x1]])
    pts = np.array([[0.3, 0.1], [0.8, 0.6]])
    t = np.array([0.1, 0.4])
    _, jets, dots = eval_loop_jet(g, pts, t)
    assert np.abs(jets[0].grad[:, 0] - 2 * pts[:, 0] * np.cos(TWO_PI * t)).max() < 1e-15
    c = TrigLoopFamily(2, [None], cos=[[1.0]])
    _, jets, dots = eval_loop_jet(c, pts, np.array([0.25, 0.25]))
    assert not jets[0].grad.any()
    assert dots[0, 0] == pytest.approx(-TWO_PI)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(-3, 3), st.floats(-3, 3))
def test_loops_are_one_periodic_and_means_are_exact(t, a, b):
    x0 = ScalarField.coordinate(0, 2)
    g = TrigLoopFamily(2, [x0 * a + 1.0], cos=[[b, x0]], sin=[[None, 0.5]])
    x = np.array([[0.2, 0.9]])
    v0 = _values(g, x, np.array([t]))
    v1 = _values(g, x, np.array([t + 1.0]))
    assert np.abs(v0 - v1).max() < 1e-12
    ts = np.arange(64) / 64
    vals = _values(g, np.repeat(x, 64, 0), ts)
    assert vals.mean() == pytest.approx(loop_mean(g, x)[0, 0], abs=1e-13)


def test_spectral_lift_of_sine():
    lat = periodic_lattice([16, 4, 4])
    lift = spectral_lift(np.sin(TWO_PI * lat[..., 0]))
    j = lift.jet(np.zeros((1, 3)))
    assert abs(j.grad[0, 0] - TWO_PI) < 1e-10
    const = spectral_lift(np.full((8, 4, 4), 1.5))
    jc = const.jet(np.random.default_rng(0).random((5, 3)))
    assert np.abs(jc.value - 1.5).max() < 1e-15 and np.abs(jc.grad).max() < 1e-13


def test_spectral_lift_of_analytic_function():
    lat = periodic_lattice([64, 4, 4])
    lift = spectral_lift(np.exp(np.sin(TWO_PI * lat[..., 0])))
    x = np.random.default_rng(1).random((200, 3))
    assert np.abs(lift.value(x) - np.exp(np.sin(TWO_PI * x[:, 0]))).max() < 1e-9


def test_spectral_lift_rejects_non_periodic_axes():
    with pytest.raises(UnsupportedDomainError):
        spectral_lift(np.zeros((8, 8)), periodic=[False, True])


def test_mixed_lift_reproduces_analytic_function():
    bounds = [(-0.1, 1.1), None]
    lat = mixed_lattice([24, 8], [False, True], bounds)
    f = lambda p: np.exp(0.3 * p[..., 0]) * np.cos(TWO_PI * p[..., 1])  # noqa: E731
    lift = mixed_lift(f(lat), [False, True], bounds)
    x = np.random.default_rng(2).random((100, 2))
    j = lift.jet(x)
    assert np.abs(j.value - f(x)).max() < 1e-12
    assert np.abs(j.grad[:, 0] - 0.3 * f(x)).max() < 1e-10


def test_composed_loop_has_exact_jets():
    x = ScalarField.coordinate(1, 2)
    g = TrigLoopFamily(2, [None], cos=[[x]])
    F = g.compose(0, 5)[0]
    pts = np.array([[0.13, 0.4]])
    j = F.jet(pts)
    arg = TWO_PI * 5 * 0.13
    assert j.value[0] == pytest.approx(0.4 * math.cos(arg))
    assert j.grad[0, 0] == pytest.approx(-0.4 * TWO_PI * 5 * math.sin(arg))
    assert j.hess[0, 0, 1] == pytest.approx(-TWO_PI * 5 * math.sin(arg))
    X = coordinate_jets(pts, 2)
    assert X[0].value[0] == 0.13


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 2 ** 32 - 1))
def test_int_is_a_primitive_vanishing_at_zero(t, a, b, seed):
    x0 = ScalarField.coordinate(0, 2)
    g = TrigLoopFamily(2, [x0 + a], cos=[[b, x0 * x0]], sin=[[x0 * 0.5 - 1.0, None, 0.3]])
    I = int_loop(g)
    x = np.random.default_rng(seed).random((1, 2))
    assert np.abs(_values(I, x, np.zeros(1))).max() < 1e-15
    _, _, dots = eval_loop_jet(I, x, np.array([t]))
    expected = _values(g, x, np.array([t])) - loop_mean(g, x)
    assert np.abs(dots - expected).max() < 1e-12
    assert np.abs(_values(I, x, np.array([t])) - _values(I, x, np.array([t + 1.0]))).max() < 1e-14
