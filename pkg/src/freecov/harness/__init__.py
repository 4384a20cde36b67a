"""Experiment configuration, runners, reports and the command line interface."""

from .config import ConfigError, ExperimentConfig, build_config, load_config, parse_config_text
from .experiments import (
    HypothesisViolation,
    binomial_moment,
    predict,
    run_convergence,
    run_counterexample,
    run_crossing_decay,
    run_hypotheses,
    run_lemma_suite,
)
from .reports import Report

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "HypothesisViolation",
    "Report",
    "binomial_moment",
    "build_config",
    "load_config",
    "parse_config_text",
    "predict",
    "run_convergence",
    "run_counterexample",
    "run_crossing_decay",
    "run_hypotheses",
    "run_lemma_suite",
]
