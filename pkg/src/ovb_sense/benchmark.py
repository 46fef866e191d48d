"""Formal covariate benchmarking.

Researcher judgments ``k_d`` and ``k_y`` compare the explanatory power of
the confounder's residualized part (its component orthogonal to the
observed covariates) with that of one or more observed benchmark
covariates. The bound functions turn those judgments into the
confounder's partial R² with the treatment and with the outcome given the
covariates; :func:`resolve_r2yz_dx` then moves the outcome-side value to
the conditioning set that also includes the treatment.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    InputError,
    InvalidCorrelation,
    InvalidInput,
    MultipleBenchmarkCovariatesUnsupported,
    SaturatedBenchmark,
    SaturatedModel,
    ZeroBenchmarkAssociation,
)
from .partial_r2 import SATURATION_TOL, PartialQuery, cohen_f2, partial_r2, total_r2
from .regress import Dataset, ModelSpec

# benchmark R² at or below this counts as no association at all
ZERO_ASSOCIATION_TOL = 1e-12


class SignCase(str, enum.Enum):
    """How the confounder moves the restricted estimate relative to the full one."""

    INCREASE = "increase"
    REDUCE_OPPOSITE_SIGN = "reduce_opposite_sign"
    REDUCE_SAME_SIGN = "reduce_same_sign"

    @classmethod
    def parse(cls, value) -> "SignCase":
        if isinstance(value, cls):
            return value
        aliases = {
            "increase": cls.INCREASE,
            "reduce-opposite": cls.REDUCE_OPPOSITE_SIGN,
            "reduce_opposite": cls.REDUCE_OPPOSITE_SIGN,
            "reduce_opposite_sign": cls.REDUCE_OPPOSITE_SIGN,
            "reduce-same": cls.REDUCE_SAME_SIGN,
            "reduce_same": cls.REDUCE_SAME_SIGN,
            "reduce_same_sign": cls.REDUCE_SAME_SIGN,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise InputError(f"unknown sign case {value!r}") from None

    @classmethod
    def realized(cls, tau_res: float, tau_full: float) -> "SignCase":
        """Regime actually realized by a restricted and a full estimate."""
        if abs(tau_res) > abs(tau_full):
            return cls.INCREASE
        if np.sign(tau_res) == np.sign(tau_full):
            return cls.REDUCE_SAME_SIGN
        return cls.REDUCE_OPPOSITE_SIGN


MODES = ("total", "partial")


@dataclass(frozen=True)
class BenchmarkSpec:
    benchmark_covariates: tuple[str, ...]
    k_d: float = 1.0
    k_y: float = 1.0
    mode: str = "partial"

    def __post_init__(self):
        cov = self.benchmark_covariates
        cov = (cov,) if isinstance(cov, str) else tuple(cov)
        object.__setattr__(self, "benchmark_covariates", cov)
        if not cov:
            raise InputError("at least one benchmark covariate is required")
        for k in (self.k_d, self.k_y):
            if not (math.isfinite(k) and k >= 0.0):
                raise InputError(f"k must be finite and non-negative, got {k}")
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {self.mode!r}")

    def validate(self, spec: ModelSpec) -> None:
        missing = [c for c in self.benchmark_covariates if c not in spec.covariates]
        if missing:
            raise InputError(f"benchmark covariates not among model covariates: {missing}")


class Bounds(NamedTuple):
    r2_dz_x: float
    r2_yz_x: float
    clamped: bool


class Resolved(NamedTuple):
    r2_yz_dx: float
    exact: bool
    clamped: bool


@dataclass(frozen=True)
class BoundResult:
    r2_dz_x: float
    r2_yz_x: float
    r2_yz_dx: float
    exact: bool
    clamped: bool
    mode: str = "partial"
    sign_case: SignCase = SignCase.INCREASE

    def __post_init__(self):
        for v in (self.r2_dz_x, self.r2_yz_x, self.r2_yz_dx):
            if not 0.0 <= v <= 1.0:
                raise InvalidInput(f"bounded R² out of [0, 1]: {v}")
        if not self.exact and self.sign_case is not SignCase.REDUCE_SAME_SIGN:
            raise InvalidInput("only the reduce_same_sign case yields a lower bound")


def _cap(*values: float) -> tuple[list[float], bool]:
    clamped = any(v > 1.0 for v in values)
    return [min(1.0, v) for v in values], clamped


def bound_total(data: Dataset, spec: ModelSpec, bm: BenchmarkSpec) -> Bounds:
    """Bounds from ratios of total R² with a single benchmark covariate."""
    spec.validate(data)
    bm.validate(spec)
    if len(bm.benchmark_covariates) != 1:
        raise MultipleBenchmarkCovariatesUnsupported(
            "total-R² benchmarking is defined for exactly one covariate"
        )
    (xj,) = bm.benchmark_covariates
    d, y, X, c = spec.treatment, spec.outcome, spec.covariates, spec.intercept

    r2_dxj = total_r2(data, d, [xj], c)
    r2_yxj = total_r2(data, y, [xj], c)
    if r2_dxj <= ZERO_ASSOCIATION_TOL or r2_yxj <= ZERO_ASSOCIATION_TOL:
        raise ZeroBenchmarkAssociation(f"{xj!r} explains none of the treatment or outcome")
    r2_dx = total_r2(data, d, X, c)
    r2_yx = total_r2(data, y, X, c)
    if 1.0 - r2_dx < SATURATION_TOL or 1.0 - r2_yx < SATURATION_TOL:
        raise SaturatedModel("covariates fully explain the treatment or the outcome")

    (r2_dz, r2_yz), clamped = _cap(
        bm.k_d * r2_dxj / (1.0 - r2_dx),
        bm.k_y * r2_yxj / (1.0 - r2_yx),
    )
    return Bounds(r2_dz, r2_yz, clamped)


def _benchmark_partial(data, spec, bm, name):
    group = bm.benchmark_covariates
    rest = tuple(c for c in spec.covariates if c not in group)
    r2 = partial_r2(PartialQuery(data, name, group, rest, spec.intercept))
    if r2 <= ZERO_ASSOCIATION_TOL:
        raise ZeroBenchmarkAssociation(
            f"benchmark {list(group)} has zero partial R² with {name!r}"
        )
    if r2 >= 1.0 - SATURATION_TOL:
        raise SaturatedBenchmark(f"benchmark {list(group)} fully explains {name!r}")
    return r2


def bound_partial_multiple(data: Dataset, spec: ModelSpec, bm: BenchmarkSpec) -> Bounds:
    """Bounds from ratios of partial R², benchmark covariates treated as one block.

    Partial R² of treatment and outcome with the block are taken given the
    remaining covariates only (the treatment is not conditioned on).
    """
    spec.validate(data)
    bm.validate(spec)
    f2_d = cohen_f2(_benchmark_partial(data, spec, bm, spec.treatment))
    f2_y = cohen_f2(_benchmark_partial(data, spec, bm, spec.outcome))
    (r2_dz, r2_yz), clamped = _cap(bm.k_d * f2_d, bm.k_y * f2_y)
    return Bounds(r2_dz, r2_yz, clamped)


def bound_partial_single(data: Dataset, spec: ModelSpec, bm: BenchmarkSpec) -> Bounds:
    if len(bm.benchmark_covariates) != 1:
        raise InputError("bound_partial_single takes exactly one benchmark covariate")
    return bound_partial_multiple(data, spec, bm)


def bound(data: Dataset, spec: ModelSpec, bm: BenchmarkSpec) -> Bounds:
    if bm.mode == "total":
        return bound_total(data, spec, bm)
    return bound_partial_multiple(data, spec, bm)


def difference_is_exact(a: float, b: float, c: float) -> bool:
    """Whether ``|a - b*c| == |a| - |b*c|``, decided from signs alone.

    A zero product makes the identity hold trivially.
    """
    bc = b * c
    if bc == 0.0:
        return True
    return bool(np.sign(a - bc) == np.sign(bc))


def classify_sign_case(case) -> bool:
    """True when the outcome-side partial R² has an exact expression in this case."""
    case = SignCase.parse(case)
    return case is not SignCase.REDUCE_SAME_SIGN


def resolve_r2yz_dx(
    r2_yz_x: float, r2_dz_x: float, r2_yd_x: float, case=SignCase.INCREASE
) -> Resolved:
    """Partial R² of outcome and confounder given treatment and covariates.

    Uses ``|R_yz.x| - |R_yd.x| |R_dz.x|`` in place of the signed numerator.
    That is exact unless the confounder shrinks the estimate without flipping
    its sign, where it is only a lower bound (``exact=False``). A negative
    numerator is clamped to zero.
    """
    for name, v in (("r2_yz_x", r2_yz_x), ("r2_dz_x", r2_dz_x), ("r2_yd_x", r2_yd_x)):
        if not 0.0 <= v < 1.0:
            raise InvalidInput(f"{name} must lie in [0, 1), got {v}")
    exact = classify_sign_case(case)
    numerator = math.sqrt(r2_yz_x) - math.sqrt(r2_yd_x * r2_dz_x)
    clamped = numerator < 0.0
    numerator = max(0.0, numerator)
    value = numerator**2 / ((1.0 - r2_yd_x) * (1.0 - r2_dz_x))
    if value > 1.0:
        value, clamped = 1.0, True
    return Resolved(value, exact, clamped)


def benchmark_bounds(
    data: Dataset,
    spec: ModelSpec,
    bm: BenchmarkSpec,
    r2_yd_x: float,
    case=SignCase.INCREASE,
) -> BoundResult:
    """Bound, then resolve. Saturated first-step bounds give the worst case of 1."""
    case = SignCase.parse(case)
    b = bound(data, spec, bm)
    if b.r2_dz_x >= 1.0 or b.r2_yz_x >= 1.0:
        r = Resolved(1.0, classify_sign_case(case), True)
    else:
        r = resolve_r2yz_dx(b.r2_yz_x, b.r2_dz_x, r2_yd_x, case)
    return BoundResult(
        r2_dz_x=b.r2_dz_x,
        r2_yz_x=b.r2_yz_x,
        r2_yz_dx=r.r2_yz_dx,
        exact=r.exact,
        clamped=b.clamped or r.clamped,
        mode=bm.mode,
        sign_case=case,
    )


def lower_bound_diagnostic(k: float, r_zxj_hypo: float, f2_bench: float) -> float:
    """Lower bound on the confounder's partial R² when it is *not* orthogonal to the benchmark.

    ``k`` is the strength ratio relative to the benchmark, ``r_zxj_hypo``
    the (hypothesised) partial correlation of confounder and benchmark, and
    ``f2_bench`` the benchmark's Cohen f². Only a lower bound exists in this
    setting, which is why it cannot be used for upper-bounding.
    """
    if not math.isfinite(k) or k < 0.0:
        raise InvalidInput(f"k must be finite and non-negative, got {k}")
    if not -1.0 < r_zxj_hypo < 1.0:
        raise InvalidCorrelation(f"correlation must lie in (-1, 1), got {r_zxj_hypo}")
    if f2_bench < 0.0:
        raise InvalidInput(f"f² must be non-negative, got {f2_bench}")
    # a negative gap gives a negative bound on |R| before squaring: no information
    gap = max(0.0, math.sqrt(k) - abs(r_zxj_hypo))
    return gap**2 / (1.0 - r_zxj_hypo**2) * f2_bench

