"""Curvature engine: Christoffel symbols, Riemann, Ricci and scalar curvature of metric 2-jets."""
from .backend import BACKEND, compiled_available, ricci, ricci_scalar, scalar
from .engine import (MetricJet2, SingularMetricError, check_metric, christoffel, christoffel_derivative,
                     diagonal_metric_jet, diagonal_ricci_parts, diagonal_scalar_parts, ricci_from_riemann,
                     ricci_numpy, ricci_split, riemann, scalar_split)
from .fields import MetricField, jet_matmul, jet_transpose, scalar_on_grid, sample_on_grid, stack_metric_jets
from .oracle import BoundaryProximityError, fd_gradient, fd_metric_jet
from .perturbation import (DiagonalMetricSpec, FrameNotIdentityError, FramePerturbationSpec, diagonal_ricci,
                           diagonal_scalar, perturbed_BQ, perturbed_E_remainder)

__all__ = [
    "BACKEND", "compiled_available", "ricci", "ricci_scalar", "scalar",
    "MetricJet2", "SingularMetricError", "check_metric", "christoffel", "christoffel_derivative",
    "diagonal_metric_jet", "diagonal_ricci_parts", "diagonal_scalar_parts", "ricci_from_riemann",
    "ricci_numpy", "ricci_split", "riemann", "scalar_split",
    "MetricField", "jet_matmul", "jet_transpose", "scalar_on_grid", "sample_on_grid", "stack_metric_jets",
    "BoundaryProximityError", "fd_gradient", "fd_metric_jet",
    "DiagonalMetricSpec", "FrameNotIdentityError", "FramePerturbationSpec", "diagonal_ricci",
    "diagonal_scalar", "perturbed_BQ", "perturbed_E_remainder",
]
