"""Corrugated maps, curvature of metric jets, and scalar-curvature band constructions."""
from .corrugation import (CorrugationSpec, DeviationReport, ResolutionError, corrugate, deviation_report,
                          predicted_first_jet)
from .curvature import BACKEND, MetricField, MetricJet2, SingularMetricError
from .grids import TensorGrid
from .jets import DomainError, Jet2, ScalarField, SingularFieldError
from .loops import TrigLoopFamily, UnsupportedDomainError, int_loop, mixed_lift, spectral_lift
from .prescription import (DomainSpec, FrameField, InfeasibleError, PrescriptionInput, bump_field, c0_distance_g,
                           extract_psi, flat_torus_metric, general_torus_metric, gram_schmidt_frame,
                           thick_torus_metric)
from .semilinear import (ConditionReport, SemilinearRelation, SigmaJet, hull_feasibility, in_thickening, residual,
                         verify_loop_conditions)

__version__ = "0.1.0"

__all__ = [
    "CorrugationSpec", "DeviationReport", "ResolutionError", "corrugate", "deviation_report", "predicted_first_jet",
    "BACKEND", "MetricField", "MetricJet2", "SingularMetricError", "TensorGrid",
    "DomainError", "Jet2", "ScalarField", "SingularFieldError",
    "TrigLoopFamily", "UnsupportedDomainError", "int_loop", "mixed_lift", "spectral_lift",
    "DomainSpec", "FrameField", "InfeasibleError", "PrescriptionInput", "bump_field", "c0_distance_g",
    "extract_psi", "flat_torus_metric", "general_torus_metric", "gram_schmidt_frame", "thick_torus_metric",
    "ConditionReport", "SemilinearRelation", "SigmaJet", "hull_feasibility", "in_thickening", "residual",
    "verify_loop_conditions",
]
