"""Seeded synthetic data with an observable confounder, and brute-force ground truth.

Every quantity in :func:`oracle_all` comes from explicit regressions with
and without the confounder column, never from the closed-form bias or
bounding formulas. :func:`oracle_rv` and :func:`oracle_rv_alpha` find the
robustness values by bisection on their defining equations, independently
of the closed-form roots.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .benchmark import SignCase
from .errors import BracketFailure, InputError, RegimeUnreachable
from .io import write_csv
from .partial_r2 import PartialQuery, eta, partial_corr, partial_r2, total_r2
from .regress import Dataset, ModelSpec, coef_summary, fit_ols, residualize
from .sensitivity import adjusted_estimate, adjusted_se, relative_bias

MAX_RETRIES = 1000


@dataclass(frozen=True)
class DgpConfig:
    """Linear model ``d = a z + X bd + e``, ``y = tau d + g z + X by + e``.

    ``z`` is correlated with ``x1`` at ``covariate_confounder_correlation``.
    When ``sign_regime`` is set, the signs of ``g`` and the size of ``tau``
    are chosen so the population bias realizes that regime, and samples
    landing in another regime are redrawn.
    """

    n: int = 200
    k_covariates: int = 3
    confounder_treatment_strength: float = 1.0
    confounder_outcome_strength: float = 1.0
    covariate_confounder_correlation: float = 0.3
    treatment_effect: float = 1.0
    noise_scale: float = 1.0
    orthogonalize_z: bool = False
    sign_regime: Optional[SignCase] = None

    def __post_init__(self):
        if self.k_covariates < 0 or self.n <= self.k_covariates + 3:
            raise InputError("need n > k_covariates + 3 and k_covariates >= 0")
        if not self.noise_scale > 0:
            raise InputError("noise_scale must be positive")
        if not -1.0 < self.covariate_confounder_correlation < 1.0:
            raise InputError("covariate_confounder_correlation must lie in (-1, 1)")
        if self.sign_regime is not None:
            object.__setattr__(self, "sign_regime", SignCase.parse(self.sign_regime))

    @property
    def covariates(self) -> tuple[str, ...]:
        return tuple(f"x{i + 1}" for i in range(self.k_covariates))

    @property
    def model(self) -> ModelSpec:
        return ModelSpec("y", "d", self.covariates)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["sign_regime"] = None if self.sign_regime is None else self.sign_regime.value
        return out


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream; same seed gives the same numbers on every platform."""
    return np.random.Generator(np.random.PCG64(seed))


def _coefficients(cfg: DgpConfig):
    a = cfg.confounder_treatment_strength
    g = cfg.confounder_outcome_strength
    tau = cfg.treatment_effect
    if cfg.sign_regime is None:
        return a, g, tau
    c = cfg.covariate_confounder_correlation if cfg.k_covariates else 0.0
    v = 1.0 - c * c
    a, g, tau = abs(a), abs(g), abs(tau)
    bias = g * a * v / (a * a * v + cfg.noise_scale**2)
    if cfg.sign_regime is SignCase.INCREASE:
        return a, g, tau if tau > 0 else max(bias, 1.0)
    g = -g
    if cfg.sign_regime is SignCase.REDUCE_SAME_SIGN:
        return a, g, tau if tau > 2.0 * bias else 2.0 * bias
    # opposite sign: the bias must exceed tau but stay below 2 tau
    return a, g, tau if 0.6 * bias < tau < 0.9 * bias else bias / 1.5


def _draw(cfg: DgpConfig, rng: np.random.Generator, a, g, tau) -> Dataset:
    n, k = cfg.n, cfg.k_covariates
    X = rng.standard_normal((n, k))
    u = rng.standard_normal(n)
    if k:
        c = cfg.covariate_confounder_correlation
        z = c * X[:, 0] + math.sqrt(1.0 - c * c) * u
    else:
        z = u
    if cfg.orthogonalize_z:
        W = np.column_stack([np.ones(n), X])
        Q, _ = np.linalg.qr(W)
        z = z - Q @ (Q.T @ z)
    bd = rng.uniform(-1.0, 1.0, k)
    by = rng.uniform(-1.0, 1.0, k)
    d = a * z + X @ bd + cfg.noise_scale * rng.standard_normal(n)
    y = tau * d + g * z + X @ by + cfg.noise_scale * rng.standard_normal(n)
    cols = {"y": y, "d": d, "z": z}
    cols.update({f"x{i + 1}": X[:, i] for i in range(k)})
    return Dataset(cols)


def realized_regime(data: Dataset, spec: ModelSpec, z: str = "z") -> SignCase:
    tau_res = fit_ols(data, spec).coefficients[spec.treatment]
    full = ModelSpec(spec.outcome, spec.treatment, (*spec.covariates, z), spec.intercept)
    tau_full = fit_ols(data, full).coefficients[spec.treatment]
    return SignCase.realized(tau_res, tau_full)


def generate(cfg: DgpConfig, seed: int) -> Dataset:
    """Dataset with columns ``y, d, z, x1..xk``; deterministic in ``(cfg, seed)``."""
    rng = make_rng(seed)
    a, g, tau = _coefficients(cfg)
    if cfg.sign_regime is None:
        return _draw(cfg, rng, a, g, tau)
    for _ in range(MAX_RETRIES):
        data = _draw(cfg, rng, a, g, tau)
        if realized_regime(data, cfg.model) is cfg.sign_regime:
            return data
    raise RegimeUnreachable(
        f"no sample in regime {cfg.sign_regime.value} after {MAX_RETRIES} draws"
    )


@dataclass(frozen=True)
class OracleRecord:
    tau_res: float
    se_res: float
    t_res: float
    df_res: int
    tau_full: float
    se_full: float
    bias: float
    relative_bias: float
    r2_dz_x: float
    r2_yz_x: float
    r2_yz_dx: float
    r2_yd_x: float
    r_dz_x: float
    r_yz_x: float
    r_yz_dx: float
    r_yd_x: float
    eta_d: float
    eta_y: float
    sign_case: SignCase

    def to_dict(self) -> dict:
        out = asdict(self)
        out["sign_case"] = self.sign_case.value
        return out


def oracle_all(data: Dataset, spec: ModelSpec, z: str = "z") -> OracleRecord:
    """Ground truth from the restricted and full regressions."""
    if z not in data:
        raise InputError(f"confounder column {z!r} not in dataset")
    d, y, X = spec.treatment, spec.outcome, spec.covariates
    c = spec.intercept
    res = coef_summary(fit_ols(data, spec), d)
    full_spec = ModelSpec(y, d, (*X, z), c)
    full = coef_summary(fit_ols(data, full_spec), d)
    bias = res.estimate - full.estimate

    def corr(left, right, given):
        return partial_corr(PartialQuery(data, left, right, tuple(given), c))

    r_dz_x = corr(d, z, X)
    r_yz_x = corr(y, z, X)
    r_yz_dx = corr(y, z, (d, *X))
    r_yd_x = corr(y, d, X)
    return OracleRecord(
        tau_res=res.estimate,
        se_res=res.se,
        t_res=res.t,
        df_res=res.df,
        tau_full=full.estimate,
        se_full=full.se,
        bias=bias,
        relative_bias=abs(bias) / abs(res.estimate),
        r2_dz_x=r_dz_x**2,
        r2_yz_x=r_yz_x**2,
        r2_yz_dx=r_yz_dx**2,
        r2_yd_x=r_yd_x**2,
        r_dz_x=r_dz_x,
        r_yz_x=r_yz_x,
        r_yz_dx=r_yz_dx,
        r_yd_x=r_yd_x,
        eta_d=eta(data, d, z, X, c) if X else 0.0,
        eta_y=eta(data, y, z, X, c) if X else 0.0,
        sign_case=SignCase.realized(res.estimate, full.estimate),
    )


def definitional_k(
    data: Dataset, spec: ModelSpec, z: str, benchmark, mode: str
) -> tuple[float, float]:
    """The ratios ``(k_d, k_y)`` that a benchmark judgment is meant to express.

    Computed from the observed confounder's residualized part, so bounds fed
    these ratios should reproduce the confounder's true partial R².
    """
    group = (benchmark,) if isinstance(benchmark, str) else tuple(benchmark)
    X, c = list(spec.covariates), spec.intercept
    zperp = residualize(data, z, X, c)
    aug = data.with_columns(__zperp__=zperp)
    out = []
    for target in (spec.treatment, spec.outcome):
        if mode == "total":
            if len(group) != 1:
                raise InputError("total mode takes one benchmark covariate")
            num = total_r2(aug, target, ["__zperp__"], c)
            den = total_r2(aug, target, list(group), c)
        else:
            rest = tuple(x for x in X if x not in group)
            num = partial_r2(PartialQuery(aug, target, "__zperp__", rest, c))
            den = partial_r2(PartialQuery(aug, target, group, rest, c))
        out.append(num / den)
    return out[0], out[1]


def _bisect(fn, lo: float, hi: float, tol: float = 1e-13) -> float:
    flo = fn(lo)
    if flo == 0.0:
        return lo
    if np.sign(flo) == np.sign(fn(hi)):
        raise BracketFailure("function does not change sign on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


_TOP = 1.0 - 1e-15


def oracle_rv(t_res: float, df: int, q: float = 1.0) -> float:
    """Robustness value by bisection on the relative-bias formula in correlations."""
    if t_res == 0.0:
        return 0.0
    r_yd = t_res / math.sqrt(t_res * t_res + df)

    def excess(x):
        return relative_bias(math.sqrt(x), math.sqrt(x), r_yd) - q

    return _bisect(excess, 0.0, _TOP)


def oracle_rv_alpha(t_res: float, df: int, q: float = 1.0, alpha: float = 0.05) -> float:
    """Robustness value for inference, by bisection on the bias-adjusted t statistic."""
    tcrit = stats.t.ppf(1.0 - alpha / 2.0, df - 1)
    est, se = abs(t_res), 1.0

    def excess(x):
        hc = (x, x)
        adj_t = (adjusted_estimate(est, se, df, hc, True) - (1.0 - q) * est) / adjusted_se(
            se, df, hc
        )
        return adj_t - tcrit

    if excess(0.0) <= 0.0:
        return 0.0
    return _bisect(excess, 0.0, _TOP)


FIXTURE_CONFIGS = {
    "increase": DgpConfig(n=200, k_covariates=3, sign_regime=SignCase.INCREASE),
    "reduce_same_sign": DgpConfig(n=200, k_covariates=3, sign_regime=SignCase.REDUCE_SAME_SIGN),
    "reduce_opposite_sign": DgpConfig(
        n=200, k_covariates=3, sign_regime=SignCase.REDUCE_OPPOSITE_SIGN
    ),
    "orthogonal": DgpConfig(
        n=200, k_covariates=3, orthogonalize_z=True, sign_regime=SignCase.INCREASE
    ),
}


def export_fixtures(seed: int, out_dir) -> dict:
    """Write one CSV per fixture config plus ``manifest.json`` with expected values."""
    os.makedirs(out_dir, exist_ok=True)
    manifest = {"seed": seed, "benchmark": "x1", "fixtures": {}}
    for name, cfg in FIXTURE_CONFIGS.items():
        data = generate(cfg, seed)
        fname = f"{name}.csv"
        write_csv(data, os.path.join(out_dir, fname))
        spec = cfg.model
        manifest["fixtures"][name] = {
            "file": fname,
            "config": cfg.to_dict(),
            "model": {"outcome": spec.outcome, "treatment": spec.treatment,
                      "covariates": list(spec.covariates)},
            "expected": oracle_all(data, spec).to_dict(),
            "k_total": list(definitional_k(data, spec, "z", "x1", "total")),
            "k_partial": list(definitional_k(data, spec, "z", "x1", "partial")),
        }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
