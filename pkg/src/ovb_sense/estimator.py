"""scikit-learn style wrappers around the sensitivity pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .benchmark import MODES, BenchmarkSpec, SignCase
from .errors import InputError
from .regress import Dataset, ModelSpec, ols
from .report import run_analysis
from .sensitivity import RobustnessQuery


def _column_indices(value, n_features: int, what: str) -> tuple[int, ...]:
    idx = (value,) if np.isscalar(value) else tuple(value)
    out = []
    for i in idx:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < n_features:
            raise InputError(f"{what} index {i!r} out of range for {n_features} features")
        out.append(int(i))
    if len(set(out)) != len(out):
        raise InputError(f"duplicate {what} indices: {out}")
    return tuple(out)


def _feature_names(n_features: int) -> list[str]:
    return [f"x{i}" for i in range(n_features)]


def _as_dataset(X: np.ndarray, y: np.ndarray) -> Dataset:
    cols = dict(zip(_feature_names(X.shape[1]), X.T))
    cols["y"] = y
    return Dataset(cols)


class OVBSensitivity(BaseEstimator):
    """Sensitivity of one OLS coefficient to an omitted confounder.

    ``X`` holds the treatment and all observed covariates; ``treatment``
    and ``benchmark`` are column indices into it. After ``fit`` the
    robustness values, bounds and verdicts are available as fitted
    attributes, with the full report in ``report_``.

    Parameters
    ----------
    treatment : int
        Column of ``X`` holding the treatment.
    benchmark : int or sequence of int
        Covariate column(s) used to bound the confounder.
    k_d, k_y : float
        Confounder strength relative to the benchmark, for the treatment
        and the outcome.
    q, alpha : float
        Fraction of the estimate to explain away, and significance level.
    mode : {"both", "total", "partial"}
    sign_case : str
        One of ``increase``, ``reduce_opposite_sign``, ``reduce_same_sign``.
    strict : bool
        Raise instead of warn when the sign case is unresolvable.
    """

    def __init__(
        self,
        treatment=0,
        benchmark=1,
        k_d=1.0,
        k_y=1.0,
        q=1.0,
        alpha=0.05,
        mode="both",
        sign_case="increase",
        strict=False,
    ):
        self.treatment = treatment
        self.benchmark = benchmark
        self.k_d = k_d
        self.k_y = k_y
        self.q = q
        self.alpha = alpha
        self.mode = mode
        self.sign_case = sign_case
        self.strict = strict

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        n_features = X.shape[1]
        (t,) = _column_indices(self.treatment, n_features, "treatment")
        bench = _column_indices(self.benchmark, n_features, "benchmark")
        if t in bench:
            raise InputError("the treatment cannot be a benchmark covariate")
        if self.mode not in (*MODES, "both"):
            raise InputError(f"mode must be total, partial or both, got {self.mode!r}")

        names = _feature_names(n_features)
        spec = ModelSpec("y", names[t], tuple(n for i, n in enumerate(names) if i != t))
        bench_names = tuple(names[i] for i in bench)
        modes = MODES if self.mode == "both" else (self.mode,)
        specs = {m: BenchmarkSpec(bench_names, self.k_d, self.k_y, m) for m in modes}
        report = run_analysis(
            _as_dataset(X, y),
            spec,
            bm_total=specs.get("total"),
            bm_partial=specs.get("partial"),
            rq=RobustnessQuery(q=self.q, alpha=self.alpha),
            case=SignCase.parse(self.sign_case),
            strict=self.strict,
        )
        self.n_features_in_ = n_features
        self.estimate_ = report.estimate
        self.se_ = report.se
        self.t_ = report.t
        self.df_ = report.df
        self.rv_q_ = report.rv_q_pct / 100.0
        self.rv_q_alpha_ = report.rv_q_alpha_pct / 100.0
        self.r2_yd_x_ = report.r2_yd_x_pct / 100.0
        self.bounds_ = {
            m: {
                "r2_dz_x": r.r2_dz_x_pct / 100.0,
                "r2_yz_x": r.r2_yz_x_pct / 100.0,
                "r2_yz_dx": r.r2_yz_dx_pct / 100.0,
            }
            for m, r in (("total", report.total_mode), ("partial", report.partial_mode))
            if r is not None
        }
        self.verdicts_ = dict(report.verdicts)
        self.report_ = report
        return self


class Residualizer(TransformerMixin, BaseEstimator):
    """Partial out control columns from the remaining columns.

    ``fit`` regresses every non-control column on the controls (plus an
    intercept); ``transform`` returns the non-control columns minus their
    fitted values. On the training data this is the residual-maker used
    for partialling out.
    """

    def __init__(self, controls=(), fit_intercept=True):
        self.controls = controls
        self.fit_intercept = fit_intercept

    def _split(self, X):
        ctrl = list(self.controls_)
        keep = [i for i in range(X.shape[1]) if i not in self.controls_]
        return X[:, keep], X[:, ctrl]

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.controls_ = _column_indices(self.controls, X.shape[1], "control")
        self.n_features_in_ = X.shape[1]
        targets, W = self._split(X)
        names = [f"w{i}" for i in range(W.shape[1])]
        coefs = []
        for col in targets.T:
            data = Dataset({**dict(zip(names, W.T)), "__target__": col})
            fit = ols(data, "__target__", names, self.fit_intercept)
            coefs.append([fit.coefficients[n] for n in fit.names])
        self.coef_ = np.array(coefs).reshape(targets.shape[1], -1)
        return self

    def transform(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise InputError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        targets, W = self._split(X)
        if self.fit_intercept:
            W = np.column_stack([np.ones(X.shape[0]), W])
        return targets - W @ self.coef_.T
