"""Experiment harness: configuration, pipelines, reports and the command line."""
from .config import DEFAULTS, KINDS, ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import generic_corrugation, run_experiment, specialization_gap
from .report import ConvergenceReport, RateUndefinedError, fit_rate

__all__ = [
    "DEFAULTS", "KINDS", "ConfigError", "ExperimentConfig", "load_config", "parse_config",
    "generic_corrugation", "run_experiment", "specialization_gap",
    "ConvergenceReport", "RateUndefinedError", "fit_rate",
]
