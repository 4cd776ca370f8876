import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrugate.curvature import MetricField, diagonal_metric_jet, ricci_scalar
from corrugate.jets import Jet2, ScalarField
from corrugate.loops import TrigLoopFamily
from corrugate.prescription import (DomainSpec, FrameField, PrescriptionInput, curvature_relation, flat_relation,
                                    flat_torus_construction)
from corrugate.semilinear import (ConditionReport, SemilinearRelation, SigmaJet, assemble_jets, hull_feasibility,
                                  in_thickening, residual, verify_loop_conditions)

TWO_PI = 2 * math.pi


def _const_relation(L, value, eps=0.1, kind="generic", n=3):
    Ls = tuple(ScalarField.constant(float(v), n) for v in L)
    return SemilinearRelation(Ls, lambda s0, cs, s1, s1s: np.full(s0.shape[:-1], float(value)), eps, kind=kind)


def _random_sigma(rng, n, B=20, m=2):
    jets = []
    for _ in range(m):
        H = rng.normal(size=(B, n, n))
        jets.append(Jet2(0.3 * rng.normal(size=B), rng.normal(size=(B, n)), H + np.swapaxes(H, 1, 2)))
    return SigmaJet.from_jets(rng.random((B, n)), jets), jets


def _flat_input(k=1.0, N=16, n=3):
    return PrescriptionInput(MetricField.identity(n), ScalarField.constant(k, n), 0.1, N, DomainSpec.torus(n))


def test_trivial_relation_has_zero_residual():
    sigma, _ = _random_sigma(np.random.default_rng(0), 3)
    assert not residual(_const_relation((0, 0), 0.0), sigma).any()


def test_flat_relation_on_zero_jet():
    rel = flat_relation(ScalarField.constant(1.0, 3), 0.05)
    r = residual(rel, SigmaJet.zero(np.random.default_rng(1).random((5, 3)), 2))
    assert np.abs(r - 1.05).max() < 1e-15


def test_thickening_is_strict():
    sigma = SigmaJet.zero(np.zeros((1, 3)), 2)
    assert in_thickening(_const_relation((1, 1), 0.0, eps=0.1), sigma).all()
    assert not in_thickening(_const_relation((1, 1), 0.1, eps=0.1), sigma).any()
    assert not in_thickening(_const_relation((1, 1), -0.1, eps=0.1), sigma).any()
    with pytest.raises(ValueError):
        _const_relation((1, 1), 0.0, eps=0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_residual_is_affine_in_pure_second_derivative(seed, a, b):
    rng = np.random.default_rng(seed)
    sigma, _ = _random_sigma(rng, 3, B=4)
    rel = curvature_relation(MetricField.identity(3), FrameField(MetricField.identity(3)),
                             ScalarField.constant(1.0, 3), 0.1)
    second = sigma.second.copy()
    second[..., 0, :] += np.array([a, b])
    shifted = SigmaJet(sigma.sigma0, sigma.value, sigma.first, second)
    diff = residual(rel, shifted) - residual(rel, sigma)
    assert np.abs(diff - (-2.0) * (a + b)).max() < 1e-9 * (1 + abs(a) + abs(b))


def test_sigma_jet_round_trip():
    sigma, jets = _random_sigma(np.random.default_rng(2), 4)
    back = assemble_jets(sigma.sigma0, sigma.checked(), sigma.first1, sigma.second1star, sigma.sigma11)
    for j, k in zip(jets, back):
        assert np.array_equal(j.value, k.value) and np.array_equal(j.grad, k.grad)
        assert np.array_equal(j.hess, k.hess)
    assert np.array_equal(sigma.second_full()[..., 0], jets[0].hess)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_flat_relation_matches_curvature_engine(n):
    rng = np.random.default_rng(n)
    k = ScalarField.constant(0.7, n)
    flat = MetricField.identity(n)
    closed = flat_relation(k, 0.05)
    engine = curvature_relation(flat, FrameField(flat), k + 0.05, 0.05)
    sigma, jets = _random_sigma(rng, n)
    a, b = residual(closed, sigma), residual(engine, sigma)
    assert np.abs(a - b).max() < 1e-12 * max(1.0, np.abs(b).max())
    # independent check: Scal of diag(1, e^2h2, e^2h3, 1, ...) assembled from the same jets
    B = sigma.value.shape[0]
    f = np.zeros((B, n))
    df = np.zeros((B, n, n))
    d2f = np.zeros((B, n, n, n))
    for r, j in zip((1, 2), jets):
        f[:, r], df[:, r], d2f[:, r] = j.value, j.grad, j.hess
    scal = ricci_scalar(diagonal_metric_jet(f, df, d2f), "numpy")[1]
    assert np.abs(a - (scal + 0.75)).max() < 1e-12 * max(1.0, np.abs(scal).max())
    if n >= 4:
        # the cross term of the trailing axes enters with a plus sign; the opposite sign is off by 4 d h2 d h3
        d = sigma.first[:, 3, :]
        assert np.abs(4 * d[:, 0] * d[:, 1]).max() > 1e-2


def test_flat_loops_satisfy_loop_conditions():
    k = 1.0 + (ScalarField.coordinate(1, 3) * TWO_PI).sin() * 0.3
    c = flat_torus_construction(PrescriptionInput(MetricField.identity(3), k, 0.1, 16, DomainSpec.torus(3)))
    pts = np.random.default_rng(3).random((64, 3))
    rep = verify_loop_conditions(c.relation, c.base, c.gamma, c.delta, pts)
    assert rep.max() <= 1e-12


def test_zero_loops_with_cancelling_remainder():
    n = 3
    x = [ScalarField.coordinate(i, n) for i in range(n)]
    f = [(x[0] * TWO_PI).sin() * x[1], (x[0] * x[0]) * 0.5 + x[2]]
    L = (1.0, 2.0)

    def R(s0, cs, s1, s1s):
        return -sum(Li * fi.jet(s0).hess[..., 0, 0] for Li, fi in zip(L, f))

    rel = SemilinearRelation(tuple(ScalarField.constant(v, n) for v in L), R, 0.1)
    z = TrigLoopFamily.zero(n, 2)
    rep = verify_loop_conditions(rel, f, z, z, np.random.default_rng(4).random((16, n)))
    assert rep.max() < 1e-14


def test_constant_shift_of_delta_is_reported():
    c = flat_torus_construction(_flat_input())
    pts = np.random.default_rng(5).random((8, 3))
    rep = verify_loop_conditions(c.relation, c.base, c.gamma, c.delta.with_constant_shift(0, 0.1), pts)
    assert rep.l1_delta == pytest.approx(0.1, abs=1e-15)
    assert rep.l1_gamma == 0.0


def test_constructed_jets_lie_in_thickening():
    c = flat_torus_construction(_flat_input(N=64))
    pts = np.random.default_rng(6).random((2000, 3))
    sigma = SigmaJet.from_jets(pts, [F.jet(pts) for F in c.fields])
    assert in_thickening(c.relation, sigma).all()


@pytest.mark.parametrize("level,feasible", [(1.05, True), (0.0, True), (-0.2, False)])
def test_hull_feasibility_levels(level, feasible):
    rel = flat_relation(ScalarField.constant(level - 0.05, 3), 0.05)
    sigma = SigmaJet.zero(np.zeros((1, 3)), 2)
    assert hull_feasibility(rel, sigma).all() == feasible
    assert hull_feasibility(rel, sigma, x=np.array([0.3, 0.2, 0.1])).all() == feasible


def test_hull_feasibility_rejects_unsupported_relations():
    with pytest.raises(NotImplementedError):
        hull_feasibility(_const_relation((1, 1), 0.0), SigmaJet.zero(np.zeros((1, 3)), 2))


def test_condition_report_csv_round_trip():
    rep = ConditionReport(0.0, 0.1, 1e-17, 2.5e-16, 1 / 3)
    assert ConditionReport.from_csv(rep.to_csv()) == rep
