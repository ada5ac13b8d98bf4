"""Experiment configuration, coverage runs and output emission."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import (
    CoverageReport,
    CoverageRow,
    run_cell,
    run_custom_coverage,
    run_ecf_coverage,
    run_experiment,
    run_rv_coverage,
)
from .output import emit_outputs, format_csv, read_coverage_csv, render_svg

__all__ = [
    "ConfigError",
    "CoverageReport",
    "CoverageRow",
    "emit_outputs",
    "ExperimentConfig",
    "format_csv",
    "load_config",
    "parse_config",
    "read_coverage_csv",
    "render_svg",
    "run_cell",
    "run_custom_coverage",
    "run_ecf_coverage",
    "run_experiment",
    "run_rv_coverage",
]
