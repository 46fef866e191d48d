"""Verdicts from comparing benchmark bounds with robustness values."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput


@dataclass(frozen=True)
class Verdict:
    """Three robustness checks and their margins (threshold minus comparand).

    A check passes only when its margin is strictly positive.
    """

    point_estimate_robust: bool
    ci_robust: bool
    extreme_scenario_safe: bool
    margin_point: float
    margin_ci: float
    margin_extreme: float


def verdict(bounds, rv: float, rv_alpha: float, r2_yd_x: float) -> Verdict:
    """Compare bounded confounder strength against the robustness values.

    ``bounds`` needs ``r2_dz_x`` and ``r2_yz_dx`` attributes (a
    :class:`~ovb_sense.benchmark.BoundResult`). The extreme-scenario check
    asks whether a confounder explaining all residual outcome variance would
    still leave the estimate nonzero.
    """
    values = (bounds.r2_dz_x, bounds.r2_yz_dx, rv, rv_alpha, r2_yd_x)
    if not all(0.0 <= v <= 1.0 for v in values):
        raise InvalidInput(f"verdict inputs must lie in [0, 1], got {values}")
    strongest = max(bounds.r2_dz_x, bounds.r2_yz_dx)
    m_point = rv - strongest
    m_ci = rv_alpha - strongest
    m_extreme = r2_yd_x - bounds.r2_dz_x
    return Verdict(
        point_estimate_robust=m_point > 0.0,
        ci_robust=m_ci > 0.0,
        extreme_scenario_safe=m_extreme > 0.0,
        margin_point=m_point,
        margin_ci=m_ci,
        margin_extreme=m_extreme,
    )
