"""Sensitivity analysis for omitted variable bias in linear regression."""

from .benchmark import (
    BenchmarkSpec,
    BoundResult,
    SignCase,
    benchmark_bounds,
    bound,
    bound_partial_multiple,
    bound_partial_single,
    bound_total,
    lower_bound_diagnostic,
    resolve_r2yz_dx,
)
from .decision import Verdict, verdict
from .errors import *  # noqa: F401,F403
from .io import load_csv, load_darfur, write_csv
from .partial_r2 import PartialQuery, cohen_f2, eta, partial_corr, partial_r2, recursive_partial_corr
from .regress import Dataset, FitResult, ModelSpec, coef_summary, fit_ols, ols, residualize
from .estimator import OVBSensitivity, Residualizer
from .report import SensitivityReport, contour_grid, render_json, render_text, run_analysis
from .sensitivity import (
    HypotheticalConfounder,
    RobustnessQuery,
    adjusted_estimate,
    adjusted_se,
    bias_magnitude,
    relative_bias,
    robustness_value,
    robustness_value_alpha,
)

__version__ = "0.1.0"
