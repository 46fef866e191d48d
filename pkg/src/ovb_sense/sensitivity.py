"""Omitted-variable bias for a hypothetical confounder, and robustness values.

All functions take summary statistics of the restricted regression
(estimate, standard error, residual degrees of freedom) together with the
confounder's partial R² with the treatment (given the covariates) and with
the outcome (given treatment and covariates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import stats

from .errors import (
    DegenerateDf,
    InvalidAlpha,
    InvalidConfounder,
    InvalidCorrelation,
    InvalidInput,
    InvalidQ,
    ZeroTreatmentAssociation,
)


@dataclass(frozen=True)
class HypotheticalConfounder:
    r2_dz_x: float
    r2_yz_dx: float

    def __post_init__(self):
        if not 0.0 <= self.r2_dz_x < 1.0:
            raise InvalidConfounder(
                f"partial R² with the treatment must lie in [0, 1), got {self.r2_dz_x}"
            )
        if not 0.0 <= self.r2_yz_dx <= 1.0:
            raise InvalidConfounder(
                f"partial R² with the outcome must lie in [0, 1], got {self.r2_yz_dx}"
            )


@dataclass(frozen=True)
class RobustnessQuery:
    q: float = 1.0
    alpha: float = 0.05
    reduce: bool = True

    def __post_init__(self):
        _check_q(self.q)
        _check_alpha(self.alpha)


@dataclass(frozen=True)
class BiasReport:
    bias_magnitude: float
    adjusted_estimate: float
    adjusted_se: float
    adjusted_t: float
    relative_bias: float


def _check_q(q):
    if not 0.0 < q <= 1.0:
        raise InvalidQ(f"q must lie in (0, 1], got {q}")


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must lie in (0, 1), got {alpha}")


def _check_fit(se_res, df, min_df=1):
    if not se_res > 0.0:
        raise InvalidInput(f"standard error must be positive, got {se_res}")
    if df < min_df:
        raise DegenerateDf(f"need at least {min_df} residual degrees of freedom, got {df}")


def _as_confounder(hc) -> HypotheticalConfounder:
    if isinstance(hc, HypotheticalConfounder):
        return hc
    return HypotheticalConfounder(*hc)


def _sign(x: float) -> float:
    return 1.0 if x >= 0 else -1.0


def t_critical(alpha: float, df: int) -> float:
    """Two-sided Student-t critical value."""
    _check_alpha(alpha)
    if df < 1:
        raise DegenerateDf(f"t quantile needs df >= 1, got {df}")
    return float(stats.t.ppf(1.0 - alpha / 2.0, df))


def r2_from_t(t: float, df: int) -> float:
    """Partial R² of the outcome with the treatment implied by its t statistic."""
    return t * t / (t * t + df)


def bias_magnitude(se_res: float, df: int, hc) -> float:
    """Absolute bias of the restricted treatment estimate.

    ``se_res * sqrt(df * R2_yz_dx * R2_dz_x / (1 - R2_dz_x))``
    """
    hc = _as_confounder(hc)
    _check_fit(se_res, df)
    return se_res * math.sqrt(df * hc.r2_yz_dx * hc.r2_dz_x / (1.0 - hc.r2_dz_x))


def adjusted_estimate(
    est_res: float, se_res: float, df: int, hc, reduce: bool = True
) -> float:
    """Estimate after removing (``reduce``) or adding the bias in magnitude."""
    bias = bias_magnitude(se_res, df, hc)
    if reduce:
        return _sign(est_res) * (abs(est_res) - bias)
    return _sign(est_res) * (abs(est_res) + bias)


def adjusted_se(se_res: float, df: int, hc) -> float:
    hc = _as_confounder(hc)
    _check_fit(se_res, df, min_df=2)
    return (
        se_res
        * math.sqrt((1.0 - hc.r2_yz_dx) / (1.0 - hc.r2_dz_x))
        * math.sqrt(df / (df - 1))
    )


def bias_report(
    est_res: float, se_res: float, df: int, hc, reduce: bool = True
) -> BiasReport:
    hc = _as_confounder(hc)
    bias = bias_magnitude(se_res, df, hc)
    est = adjusted_estimate(est_res, se_res, df, hc, reduce)
    se = adjusted_se(se_res, df, hc)
    t = est / se if se > 0 else math.copysign(math.inf, est)
    rel = bias / abs(est_res) if est_res != 0 else math.inf
    return BiasReport(bias, est, se, t, rel)


def _rv_from_f(f: float) -> float:
    # positive root of x**2 + f**2 x - f**2, written without cancellation
    if f <= 0.0:
        return 0.0
    f2 = f * f
    return 2.0 * f2 / (math.sqrt(f2 * f2 + 4.0 * f2) + f2)


def robustness_value(t_res: float, df: int, q: float = 1.0) -> float:
    """Equal partial R² with treatment and outcome that shrinks the estimate by ``100*q`` percent."""
    _check_q(q)
    if df < 1:
        raise DegenerateDf(f"need df >= 1, got {df}")
    return _rv_from_f(q * abs(t_res) / math.sqrt(df))


def robustness_value_alpha(
    t_res: float, df: int, q: float = 1.0, alpha: float = 0.05
) -> float:
    """Equal partial R² at which the bias-adjusted test of ``(1-q)*estimate`` stops rejecting.

    Zero when the estimate is already insignificant at ``alpha``. The
    adjusted test has ``df - 1`` degrees of freedom because the confounder
    enters as one more regressor.
    """
    _check_q(q)
    _check_alpha(alpha)
    if df < 2:
        raise DegenerateDf(f"need df >= 2, got {df}")
    f = abs(t_res) / math.sqrt(df)
    f_qa = q * f - t_critical(alpha, df - 1) / math.sqrt(df - 1)
    return _rv_from_f(f_qa)


def relative_bias(r_yz_dx: float, r_dz_x: float, r_yd_x: float) -> float:
    """|bias / restricted estimate| in terms of partial correlations."""
    if r_yd_x == 0.0:
        raise ZeroTreatmentAssociation("treatment has zero partial correlation with the outcome")
    if abs(r_yd_x) >= 1.0 or abs(r_dz_x) >= 1.0 or abs(r_yz_dx) > 1.0:
        raise InvalidCorrelation("correlations out of range")
    return (
        abs(r_yz_dx) * abs(r_dz_x) / abs(r_yd_x)
        * math.sqrt((1.0 - r_yd_x**2) / (1.0 - r_dz_x**2))
    )
