"""Simulation of locally stationary linear processes and local block bootstrap inference."""

from .lbb import (
    LbbPlan,
    bootstrap_distribution,
    bootstrap_mean_exact,
    bootstrap_variance_exact,
    lbb_resample,
    symmetric_ci,
    validate_rates,
)
from .oracle import (
    enumerate_bootstrap_law,
    expected_functional,
    integrated_target_rv,
    limiting_variance_mc,
)
from .process import (
    AlphaStable,
    Gaussian,
    Path,
    ProcessSpec,
    TvAR1,
    TvMA,
    build_spec,
    smile_ma_spec,
    stable_sin_ar_spec,
    sample_innovation,
    sample_innovations,
    simulate,
    simulate_companion,
    simulate_truncated_companion,
    simulate_tvar1,
    simulate_tvma,
)
from .stats import (
    FunctionalFamily,
    WeightScheme,
    global_root_weights,
    kernel_weights,
    local_ecf,
    realized_volatility,
    true_cf_tvar1,
    unit_weights,
    weighted_statistic,
)

__all__ = [
    "AlphaStable",
    "bootstrap_distribution",
    "bootstrap_mean_exact",
    "bootstrap_variance_exact",
    "build_spec",
    "enumerate_bootstrap_law",
    "expected_functional",
    "FunctionalFamily",
    "Gaussian",
    "global_root_weights",
    "integrated_target_rv",
    "kernel_weights",
    "lbb_resample",
    "LbbPlan",
    "limiting_variance_mc",
    "local_ecf",
    "Path",
    "ProcessSpec",
    "realized_volatility",
    "sample_innovation",
    "sample_innovations",
    "simulate",
    "simulate_companion",
    "simulate_truncated_companion",
    "simulate_tvar1",
    "simulate_tvma",
    "smile_ma_spec",
    "stable_sin_ar_spec",
    "symmetric_ci",
    "true_cf_tvar1",
    "TvAR1",
    "TvMA",
    "unit_weights",
    "validate_rates",
    "weighted_statistic",
    "WeightScheme",
]

__version__ = "0.1.0"
