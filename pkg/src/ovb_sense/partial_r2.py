"""Total and partial R², partial correlations and related identities.

Partial R² has two independent routes here: the increment-in-R² ratio
(:func:`partial_r2`) and the correlation of residuals
(:func:`partial_corr`). The first is used for magnitudes and accepts a
block of columns on the right; the second carries the sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    DegenerateConditioning,
    DenominatorDegenerate,
    InputError,
    InvalidCorrelation,
    Saturated,
    ZeroVarianceResidual,
)
from .regress import Dataset, ols, residualize

SATURATION_TOL = 1e-12
# residual norm below this fraction of the target's norm counts as zero
ZERO_VARIANCE_TOL = 1e-10


@dataclass(frozen=True)
class PartialQuery:
    """Association of ``left`` with ``right`` after partialling out ``given``.

    ``right`` may name a block of columns; only :func:`partial_r2`
    accepts a block.
    """

    data: Dataset
    left: str
    right: Union[str, tuple[str, ...]]
    given: tuple[str, ...] = ()
    intercept: bool = True

    def __post_init__(self):
        right = (self.right,) if isinstance(self.right, str) else tuple(self.right)
        object.__setattr__(self, "right", right if len(right) > 1 else right[0])
        object.__setattr__(self, "given", tuple(self.given))
        if not right:
            raise InputError("right-hand block is empty")
        if self.left in right:
            raise InputError("left and right must differ")
        overlap = ({self.left} | set(right)) & set(self.given)
        if overlap:
            raise InputError(f"conditioning set contains {sorted(overlap)}")

    @property
    def right_block(self) -> tuple[str, ...]:
        return (self.right,) if isinstance(self.right, str) else self.right


def total_r2(
    data: Dataset, target: str, regressors: Sequence[str], intercept: bool = True
) -> float:
    if not regressors and not intercept:
        return 0.0
    return ols(data, target, list(regressors), intercept).total_r2


def partial_r2(q: PartialQuery) -> float:
    """Increment in R² from adding ``right`` to ``given``, relative to 1 - R²(given)."""
    r2_given = total_r2(q.data, q.left, q.given, q.intercept)
    if 1.0 - r2_given < SATURATION_TOL:
        raise DegenerateConditioning(
            f"{q.left!r} is (numerically) fully explained by the conditioning set"
        )
    r2_full = total_r2(q.data, q.left, [*q.given, *q.right_block], q.intercept)
    value = (r2_full - r2_given) / (1.0 - r2_given)
    return min(1.0, max(0.0, value))


def _residual(data: Dataset, name: str, given, intercept: bool) -> np.ndarray:
    res = residualize(data, name, list(given), intercept)
    raw = data[name] - data[name].mean() if intercept else data[name]
    scale = float(np.linalg.norm(raw))
    if scale == 0.0 or np.linalg.norm(res) <= ZERO_VARIANCE_TOL * scale:
        raise ZeroVarianceResidual(
            f"{name!r} has no variation left after partialling out {list(given)}"
        )
    return res


def partial_corr(q: PartialQuery) -> float:
    """Signed correlation between the residuals of ``left`` and ``right`` on ``given``."""
    if not isinstance(q.right, str):
        raise InputError("partial_corr needs a single right-hand column")
    a = _residual(q.data, q.left, q.given, q.intercept)
    b = _residual(q.data, q.right, q.given, q.intercept)
    r = float(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return min(1.0, max(-1.0, r))


def recursive_partial_corr(r_yz_x: float, r_yd_x: float, r_dz_x: float) -> float:
    """Partial correlation of y and z given (x, d), from correlations given x only.

    >>> recursive_partial_corr(0.5, 0.5, 0.5)  # doctest: +ELLIPSIS
    0.3333...
    """
    if abs(r_yd_x) >= 1.0 or abs(r_dz_x) >= 1.0:
        raise DenominatorDegenerate("conditioning correlation has magnitude 1")
    return (r_yz_x - r_yd_x * r_dz_x) / (
        np.sqrt(1.0 - r_yd_x**2) * np.sqrt(1.0 - r_dz_x**2)
    )


def cohen_f2(r2: float) -> float:
    if not 0.0 <= r2 <= 1.0:
        raise InvalidCorrelation(f"R² must lie in [0, 1], got {r2}")
    if r2 >= 1.0:
        raise Saturated("Cohen's f² is infinite at R² = 1")
    return r2 / (1.0 - r2)


def eta(
    data: Dataset, y: str, z: str, x: Sequence[str], intercept: bool = True
) -> float:
    """R²(y ~ z residualized on x) minus R²(y ~ z).

    The remainder by which R²(y ~ x + z) differs from R²(y ~ x) + R²(y ~ z);
    zero when z is orthogonal to x.
    """
    zperp = _residual(data, z, x, intercept)
    tmp = "__zperp__"
    while tmp in data:
        tmp += "_"
    aug = data.with_columns(**{tmp: zperp})
    return total_r2(aug, y, [tmp], intercept) - total_r2(data, y, [z], intercept)
