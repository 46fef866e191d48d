"""Three-step sensitivity analysis, report rendering and contour grids."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .benchmark import BenchmarkSpec, BoundResult, SignCase, benchmark_bounds
from .decision import verdict
from .errors import InvalidGrid, UnresolvableSignCase
from .regress import CoefSummary, Dataset, ModelSpec, coef_summary, fit_ols
from .sensitivity import (
    RobustnessQuery,
    adjusted_estimate,
    adjusted_se,
    r2_from_t,
    robustness_value,
    robustness_value_alpha,
)


@dataclass(frozen=True)
class ModeResult:
    r2_yz_dx_pct: float
    r2_dz_x_pct: float
    r2_yz_x_pct: float
    exact: bool
    clamped: bool
    k_d: float
    k_y: float
    benchmark: tuple[str, ...]


@dataclass(frozen=True)
class SensitivityReport:
    estimate: float
    se: float
    t: float
    df: int
    rv_q_pct: float
    rv_q_alpha_pct: float
    r2_yd_x_pct: float
    total_mode: Optional[ModeResult]
    partial_mode: Optional[ModeResult]
    verdicts: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    warnings: tuple = ()

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verdicts"] = {m: asdict(v) for m, v in self.verdicts.items()}
        for key in ("total_mode", "partial_mode"):
            if out[key] is not None:
                out[key]["benchmark"] = list(out[key]["benchmark"])
        out["warnings"] = list(self.warnings)
        return out


def _mode_result(b: BoundResult, bm: BenchmarkSpec) -> ModeResult:
    return ModeResult(
        r2_yz_dx_pct=100.0 * b.r2_yz_dx,
        r2_dz_x_pct=100.0 * b.r2_dz_x,
        r2_yz_x_pct=100.0 * b.r2_yz_x,
        exact=b.exact,
        clamped=b.clamped,
        k_d=bm.k_d,
        k_y=bm.k_y,
        benchmark=bm.benchmark_covariates,
    )


def run_analysis(
    data: Dataset,
    spec: ModelSpec,
    bm_total: Optional[BenchmarkSpec] = None,
    bm_partial: Optional[BenchmarkSpec] = None,
    rq: RobustnessQuery = RobustnessQuery(),
    case=SignCase.INCREASE,
    strict: bool = False,
) -> SensitivityReport:
    """Robustness values, benchmark bounds and verdicts for one model.

    With ``strict`` an unresolvable sign case raises
    :class:`UnresolvableSignCase` instead of being reported as a warning.
    """
    if bm_total is None and bm_partial is None:
        raise ValueError("at least one benchmark specification is required")
    case = SignCase.parse(case)
    fit = coef_summary(fit_ols(data, spec), spec.treatment)
    rv = robustness_value(fit.t, fit.df, rq.q)
    rv_a = robustness_value_alpha(fit.t, fit.df, rq.q, rq.alpha)
    r2_yd_x = r2_from_t(fit.t, fit.df)

    warnings = []
    modes = {}
    verdicts = {}
    for bm in (bm_total, bm_partial):
        if bm is None:
            continue
        b = benchmark_bounds(data, spec, bm, r2_yd_x, case)
        if not b.exact:
            msg = (
                f"{bm.mode} mode: sign case {case.value} has no exact expression; "
                "R2_yz_dx is a lower bound"
            )
            if strict:
                raise UnresolvableSignCase(msg)
            warnings.append(msg)
        if b.clamped:
            warnings.append(f"{bm.mode} mode: a bound was clamped to [0, 1]")
        modes[bm.mode] = _mode_result(b, bm)
        verdicts[bm.mode] = verdict(b, rv, rv_a, r2_yd_x)

    return SensitivityReport(
        estimate=fit.estimate,
        se=fit.se,
        t=fit.t,
        df=fit.df,
        rv_q_pct=100.0 * rv,
        rv_q_alpha_pct=100.0 * rv_a,
        r2_yd_x_pct=100.0 * r2_yd_x,
        total_mode=modes.get("total"),
        partial_mode=modes.get("partial"),
        verdicts=verdicts,
        metadata={
            "outcome": spec.outcome,
            "treatment": spec.treatment,
            "n_covariates": len(spec.covariates),
            "q": rq.q,
            "alpha": rq.alpha,
            "sign_case": case.value,
            "k_d": {m: r.k_d for m, r in modes.items()},
            "k_y": {m: r.k_y for m, r in modes.items()},
            "benchmark_covariates": {m: list(r.benchmark) for m, r in modes.items()},
            "clamped": {m: r.clamped for m, r in modes.items()},
            "exact": {m: r.exact for m, r in modes.items()},
        },
        warnings=tuple(warnings),
    )


# -- rendering --------------------------------------------------------------

_DETAIL_FIELDS = (
    ("estimate", lambda r: r.estimate),
    ("se", lambda r: r.se),
    ("t", lambda r: r.t),
    ("rv_q_pct", lambda r: r.rv_q_pct),
    ("rv_q_alpha_pct", lambda r: r.rv_q_alpha_pct),
    ("r2_yd_x_pct", lambda r: r.r2_yd_x_pct),
)


def detail_values(report: SensitivityReport) -> dict[str, float]:
    """Flat name -> value map of every numeric field shown in the text report."""
    out = {name: get(report) for name, get in _DETAIL_FIELDS}
    for mode in ("total", "partial"):
        m = getattr(report, f"{mode}_mode")
        if m is None:
            continue
        out[f"{mode}.r2_yz_dx_pct"] = m.r2_yz_dx_pct
        out[f"{mode}.r2_dz_x_pct"] = m.r2_dz_x_pct
        out[f"{mode}.r2_yz_x_pct"] = m.r2_yz_x_pct
        v = report.verdicts[mode]
        out[f"{mode}.margin_point"] = v.margin_point
        out[f"{mode}.margin_ci"] = v.margin_ci
        out[f"{mode}.margin_extreme"] = v.margin_extreme
    return out


def _pct(m: Optional[ModeResult], attr: str) -> str:
    return "-" if m is None else f"{getattr(m, attr):.3f}"


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def render_text(report: SensitivityReport) -> str:
    md = report.metadata
    lines = [
        f"Sensitivity of {md['treatment']!r} -> {md['outcome']!r} "
        f"(q={md['q']:g}, alpha={md['alpha']:g}, sign case={md['sign_case']})",
        "",
        f"{'':>10} {'':>10} {'':>9} {'':>9} {'Total R2 bench':>19} "
        f"{'Partial R2 bench':>19} {'':>9}",
        f"{'Est.':>10} {'SE':>10} {'RV_q':>9} {'RV_q,a':>9} "
        f"{'R2yz.dx':>9} {'R2dz.x':>9} {'R2yz.dx':>9} {'R2dz.x':>9} {'R2yd.x':>9}",
        f"{'':>10} {'':>10} {'(%)':>9} {'(%)':>9} {'(%)':>9} {'(%)':>9} "
        f"{'(%)':>9} {'(%)':>9} {'(%)':>9}",
        f"{report.estimate:>10.3f} {report.se:>10.3f} {report.rv_q_pct:>9.3f} "
        f"{report.rv_q_alpha_pct:>9.3f} "
        f"{_pct(report.total_mode, 'r2_yz_dx_pct'):>9} "
        f"{_pct(report.total_mode, 'r2_dz_x_pct'):>9} "
        f"{_pct(report.partial_mode, 'r2_yz_dx_pct'):>9} "
        f"{_pct(report.partial_mode, 'r2_dz_x_pct'):>9} "
        f"{report.r2_yd_x_pct:>9.3f}",
        "",
    ]
    for mode in ("total", "partial"):
        m = getattr(report, f"{mode}_mode")
        if m is None:
            continue
        v = report.verdicts[mode]
        lines += [
            f"[{mode} R2 benchmarking: {', '.join(m.benchmark)}; "
            f"k_d={m.k_d:g}, k_y={m.k_y:g}]",
            f"  point estimate robust:      {_yesno(v.point_estimate_robust)}",
            f"  confidence interval robust: {_yesno(v.ci_robust)}",
            f"  worst-case confounder safe: {_yesno(v.extreme_scenario_safe)}",
            f"  exact: {_yesno(m.exact)}  clamped: {_yesno(m.clamped)}",
        ]
    for w in report.warnings:
        lines.append(f"warning: {w}")
    lines += ["", "Details:"]
    lines += [f"  {name} = {value:.6g}" for name, value in detail_values(report).items()]
    lines.append(f"  df = {report.df}")
    return "\n".join(lines) + "\n"


def render_json(report: SensitivityReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


# -- contour grid ------------------------------------------------------------

GRID_HEADER = ("r2_dz_x", "r2_yz_dx", "adjusted_estimate", "adjusted_t")


def contour_grid(
    fit: CoefSummary,
    steps_x: int,
    steps_y: int,
    max_x: float,
    max_y: float,
    rq: RobustnessQuery = RobustnessQuery(),
) -> np.ndarray:
    """Bias-adjusted estimate and t over a grid of confounder strengths.

    Rows run over ``r2_dz_x`` in the outer loop and ``r2_yz_dx`` in the
    inner loop. A null confounder leaves the fit untouched, so the origin
    cell reproduces the unadjusted estimate and t statistic.
    """
    if steps_x < 2 or steps_y < 2:
        raise InvalidGrid("grid needs at least 2 steps per axis")
    if not (0.0 < max_x < 1.0) or not (0.0 < max_y <= 1.0):
        raise InvalidGrid("need 0 < max_x < 1 and 0 < max_y <= 1")
    est, se, df = fit.estimate, fit.se, fit.df
    rows = np.empty((steps_x * steps_y, 4))
    i = 0
    for rx in np.linspace(0.0, max_x, steps_x):
        for ry in np.linspace(0.0, max_y, steps_y):
            hc = (float(rx), float(ry))
            if rx == 0.0 and ry == 0.0:
                a_est, a_t = est, fit.t
            else:
                a_est = adjusted_estimate(est, se, df, hc, rq.reduce)
                a_se = adjusted_se(se, df, hc)
                a_t = a_est / a_se if a_se > 0 else math.copysign(math.inf, a_est)
            rows[i] = (rx, ry, a_est, a_t)
            i += 1
    return rows


def write_grid_csv(grid: np.ndarray, path) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GRID_HEADER)
        for row in grid:
            w.writerow([repr(float(v)) for v in row])
