"""OLS fitting and residualization on named-column datasets.

Least squares is solved through a Householder QR factorization of the
design matrix; the normal equations are never formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    EmptyDataset,
    InputError,
    InsufficientRows,
    RankDeficient,
    UnknownColumn,
    ZeroVarianceResidual,
)

INTERCEPT = "(Intercept)"
RANK_TOL = 1e-10


class Dataset:
    """Ordered, immutable collection of equal-length finite numeric columns."""

    __slots__ = ("_columns", "_n")

    def __init__(self, columns: Mapping[str, Iterable[float]]):
        cols: dict[str, np.ndarray] = {}
        n = None
        for name, values in columns.items():
            if not isinstance(name, str) or not name:
                raise InputError(f"column names must be non-empty strings, got {name!r}")
            if name in cols:
                raise InputError(f"duplicate column name {name!r}")
            arr = np.asarray(values, dtype=np.float64).reshape(-1)
            if arr.flags.writeable:
                arr = arr.copy()
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise InputError(
                    f"column {name!r} has length {arr.shape[0]}, expected {n}"
                )
            if not np.all(np.isfinite(arr)):
                raise InputError(f"column {name!r} contains non-finite values")
            arr.flags.writeable = False
            cols[name] = arr
        if not cols or not n:
            raise EmptyDataset("dataset has no rows")
        self._columns = MappingProxyType(cols)
        self._n = n

    @property
    def columns(self) -> Mapping[str, np.ndarray]:
        return self._columns

    @property
    def names(self) -> list[str]:
        return list(self._columns)

    @property
    def n_rows(self) -> int:
        return self._n

    def __contains__(self, name) -> bool:
        return name in self._columns

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self._columns[name]
        except KeyError:
            raise UnknownColumn(name) from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.names == other.names and all(
            np.array_equal(self[c], other[c]) for c in self.names
        )

    def __repr__(self) -> str:
        return f"Dataset(n_rows={self._n}, columns={self.names})"

    def matrix(self, names: Sequence[str]) -> np.ndarray:
        if not names:
            return np.empty((self._n, 0))
        return np.column_stack([self[c] for c in names])

    def with_columns(self, **new: Iterable[float]) -> "Dataset":
        cols = dict(self._columns)
        cols.update(new)
        return Dataset(cols)

    def take(self, rows) -> "Dataset":
        """Row subset or permutation."""
        idx = np.asarray(rows)
        return Dataset({c: v[idx] for c, v in self._columns.items()})

    def with_dummies(self, column: str, drop_first: bool = True) -> "Dataset":
        """Replace an integer-coded column by 0/1 indicator columns.

        New columns are named ``{column}_{code}``, placed where the
        original column was. With ``drop_first`` the smallest code is the
        omitted reference level.
        """
        values = self[column]
        if not np.all(values == np.round(values)):
            raise InputError(f"column {column!r} is not integer coded")
        levels = np.unique(values)
        if drop_first:
            levels = levels[1:]
        cols: dict[str, np.ndarray] = {}
        for name, arr in self._columns.items():
            if name != column:
                cols[name] = arr
                continue
            for lv in levels:
                cols[f"{column}_{int(lv)}"] = (values == lv).astype(np.float64)
        return Dataset(cols)

    def dummy_names(self, column: str, drop_first: bool = True) -> list[str]:
        levels = np.unique(self[column])
        if drop_first:
            levels = levels[1:]
        return [f"{column}_{int(lv)}" for lv in levels]


@dataclass(frozen=True)
class ModelSpec:
    outcome: str
    treatment: str
    covariates: tuple[str, ...] = ()
    intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple(self.covariates))
        if self.outcome == self.treatment:
            raise InputError("outcome and treatment must differ")
        if self.outcome in self.covariates or self.treatment in self.covariates:
            raise InputError("outcome and treatment may not appear among covariates")
        if len(set(self.covariates)) != len(self.covariates):
            raise InputError("duplicate covariate names")

    def validate(self, data: Dataset) -> None:
        for name in (self.outcome, self.treatment, *self.covariates):
            if name not in data:
                raise UnknownColumn(name)

    @property
    def regressors(self) -> tuple[str, ...]:
        return (self.treatment, *self.covariates)


@dataclass(frozen=True)
class FitResult:
    names: tuple[str, ...]
    coefficients: Mapping[str, float]
    standard_errors: Mapping[str, float]
    residuals: np.ndarray = field(repr=False)
    fitted: np.ndarray = field(repr=False)
    df: int
    total_r2: float
    ssr: float
    intercept: bool


class CoefSummary(NamedTuple):
    estimate: float
    se: float
    t: float
    df: int


def _design(data: Dataset, regressors: Sequence[str], intercept: bool):
    for name in regressors:
        if name == INTERCEPT:
            raise InputError(f"{INTERCEPT!r} is a reserved column name")
        if name not in data:
            raise UnknownColumn(name)
    X = data.matrix(list(regressors))
    names = list(regressors)
    if intercept:
        X = np.column_stack([np.ones(data.n_rows), X])
        names.insert(0, INTERCEPT)
    return X, tuple(names)


def _qr_checked(X: np.ndarray):
    n, p = X.shape
    if p == 0:
        raise InputError("regression needs at least one regressor or an intercept")
    if n <= p:
        raise InsufficientRows(f"{n} rows for {p} regressors")
    Q, R = np.linalg.qr(X, mode="reduced")
    sv = np.linalg.svd(R, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] <= RANK_TOL:
        raise RankDeficient(
            f"design matrix is numerically rank deficient "
            f"(singular value ratio {sv[-1] / sv[0] if sv[0] else 0.0:.3g})"
        )
    return Q, R


def ols(
    data: Dataset,
    target: str,
    regressors: Sequence[str],
    intercept: bool = True,
) -> FitResult:
    """Regress ``target`` on ``regressors`` (plus a constant if ``intercept``)."""
    y = data[target]
    X, names = _design(data, regressors, intercept)
    Q, R = _qr_checked(X)
    qty = Q.T @ y
    beta = solve_triangular(R, qty)
    fitted = Q @ qty
    resid = y - fitted
    n, p = X.shape
    df = n - p
    ssr = float(resid @ resid)
    if intercept:
        centered = y - y.mean()
        sst = float(centered @ centered)
    else:
        sst = float(y @ y)
    r2 = 1.0 if sst == 0.0 else min(1.0, max(0.0, 1.0 - ssr / sst))

    r_inv = solve_triangular(R, np.eye(p))
    sigma2 = ssr / df
    se = np.sqrt(sigma2 * np.sum(r_inv**2, axis=1))

    resid.flags.writeable = False
    fitted.flags.writeable = False
    return FitResult(
        names=names,
        coefficients=MappingProxyType(dict(zip(names, map(float, beta)))),
        standard_errors=MappingProxyType(dict(zip(names, map(float, se)))),
        residuals=resid,
        fitted=fitted,
        df=df,
        total_r2=r2,
        ssr=ssr,
        intercept=intercept,
    )


def fit_ols(data: Dataset, spec: ModelSpec) -> FitResult:
    """Fit the restricted model: outcome on treatment and covariates."""
    spec.validate(data)
    return ols(data, spec.outcome, spec.regressors, spec.intercept)


def residualize(
    data: Dataset, target: str, on: Sequence[str], intercept: bool = True
) -> np.ndarray:
    """Part of ``target`` orthogonal to the columns in ``on`` (and the constant)."""
    y = data[target]
    if not on and not intercept:
        return y.copy()
    return np.array(ols(data, target, on, intercept).residuals)


def coef_summary(fit: FitResult, name: str) -> CoefSummary:
    if name not in fit.coefficients:
        raise UnknownColumn(name)
    est = fit.coefficients[name]
    se = fit.standard_errors[name]
    if not se > 0.0:
        raise ZeroVarianceResidual("residual variance is zero; standard error undefined")
    return CoefSummary(est, se, est / se, fit.df)
