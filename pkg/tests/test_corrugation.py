import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrugate.corrugation import (CorrugationSpec, DeviationReport, ResolutionError, corrugate, deviation_report,
                                   predicted_first_jet, reports_to_csv)
from corrugate.curvature.oracle import fd_gradient
from corrugate.grids import TensorGrid
from corrugate.harness.experiments import generic_corrugation
from corrugate.harness.report import fit_rate
from corrugate.jets import ScalarField
from corrugate.loops import TrigLoopFamily

TWO_PI = 2 * math.pi


def _cosine_spec(n, N, A=1.0, delta=None, base=None):
    gamma = TrigLoopFamily(n, [None, None], cos=[[A], [-A]])
    delta = delta if delta is not None else TrigLoopFamily.zero(n, 2)
    base = base if base is not None else (ScalarField.constant(0.0, n),) * 2
    return CorrugationSpec(base, gamma, delta, 0, N)


def test_zero_loops_leave_the_map_unchanged():
    spec = generic_corrugation(3, 16, zero_loops=True)
    F = corrugate(spec)
    x = np.random.default_rng(0).random((50, 3))
    for Fr, fr in zip(F, spec.base):
        a, b = Fr.jet(x), fr.jet(x)
        assert np.array_equal(a.value, b.value) and np.array_equal(a.hess, b.hess)
    pred = predicted_first_jet(spec, x)
    for r, fr in enumerate(spec.base):
        j = fr.jet(x)
        assert np.abs(pred.di[:, r] - j.grad[:, 0]).max() == 0.0
        assert np.abs(pred.dii[:, r] - j.hess[:, 0, 0]).max() == 0.0
    rep = deviation_report(spec, TensorGrid.for_corrugation(3, 0, 16, slow=4))
    assert rep.values() == (0.0,) * 6


def test_single_frequency_example():
    F = corrugate(_cosine_spec(2, 1))
    x = np.random.default_rng(1).random((20, 2))
    s = np.sin(TWO_PI * x[:, 0]) / TWO_PI
    assert np.abs(F[0].value(x) - s).max() < 1e-15
    assert np.abs(F[1].value(x) + s).max() < 1e-15


def test_sup_norm_at_ten_oscillations():
    F = corrugate(_cosine_spec(1, 10))
    x = (np.arange(256) / 256)[:, None]
    assert abs(np.abs(F[0].value(x)).max() - 1 / (20 * math.pi)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 5.0), st.integers(1, 40))
def test_c0_deviation_of_constant_amplitude_loop_is_closed_form(A, N):
    rep = deviation_report(_cosine_spec(2, N, A), TensorGrid.for_corrugation(2, 0, N, slow=4))
    assert rep.dev_c0 == pytest.approx(A / (TWO_PI * N), rel=1e-12)


def test_second_derivative_prediction_at_quarter_phase():
    N, A = 7, 1.3
    spec = _cosine_spec(2, N, A)
    x = np.array([[0.25 / N, 0.4]])
    pred = predicted_first_jet(spec, x)
    assert pred.dii[0, 0] == pytest.approx(-TWO_PI * N * A, rel=1e-14)
    assert pred.dii[0, 1] == pytest.approx(TWO_PI * N * A, rel=1e-14)


def test_constant_coefficient_loops_have_exact_jet_laws():
    n = 3
    x = [ScalarField.coordinate(i, n) for i in range(n)]
    base = ((x[1] * TWO_PI).sin() * 0.3, (x[0] * TWO_PI).cos() * (x[2] * TWO_PI).sin() * 0.2)
    delta = TrigLoopFamily(n, [None, None], cos=[[0.4], [None, -0.2]], sin=[[None, 0.1], [0.3]])
    for N in (8, 16, 32):
        grid = TensorGrid.for_corrugation(n, 0, N, slow=6)
        no_delta = deviation_report(_cosine_spec(n, N, 0.8, base=base), grid)
        assert no_delta.dev_di < 1e-12
        full = deviation_report(_cosine_spec(n, N, 0.8, delta=delta, base=base), grid)
        assert full.dev_dii < 1e-10 * N and full.dev_dij < 1e-12
        # the Int(delta)/N term of the first derivative is not covered by (iv)
        assert full.dev_di > 1e-3 / N


def test_under_resolved_grid_is_rejected():
    spec = generic_corrugation(3, 32)
    with pytest.raises(ResolutionError):
        deviation_report(spec, TensorGrid.uniform([127, 4, 4]))


def test_deviation_report_csv_round_trip():
    reps = [DeviationReport(8, 0.1, 0.2, 0.3, 1 / 3, 1e-17, 5.0), DeviationReport(16, 0, 0, 0, 0, 0, 0)]
    text = reports_to_csv(reps)
    rows = [line.split(",") for line in text.strip().splitlines()]
    assert tuple(rows[0]) == DeviationReport.COLUMNS
    assert [DeviationReport.from_csv_row(r) for r in rows[1:]] == reps


def test_generic_deviations_decay_at_first_order():
    sweep = [8, 16, 32, 64]
    reps = [deviation_report(generic_corrugation(3, N), TensorGrid.for_corrugation(3, 0, N, slow=8)) for N in sweep]
    for c in range(6):
        slope = fit_rate([(r.N, r.values()[c]) for r in reps])
        assert -1.3 <= slope <= -0.7, (DeviationReport.COLUMNS[c + 1], slope)


@pytest.mark.parametrize("N", [4, 16])
def test_corrugated_jets_match_finite_differences_and_are_periodic(N):
    spec = generic_corrugation(3, N)
    x = np.random.default_rng(N).random((10, 3))
    for F in corrugate(spec):
        j = F.jet(x)
        g, H = fd_gradient(F.value, x, 1e-3 / N)
        assert np.abs(j.grad - g).max() < 1e-6 * N
        assert np.abs(j.hess - H).max() < 1e-6 * N * N
        for a in range(3):
            assert np.abs(F.value(x + np.eye(3)[a]) - j.value).max() < 1e-12
