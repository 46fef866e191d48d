import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ovb_sense.benchmark import (
    BenchmarkSpec,
    BoundResult,
    SignCase,
    benchmark_bounds,
    bound_partial_multiple,
    bound_partial_single,
    bound_total,
    classify_sign_case,
    difference_is_exact,
    lower_bound_diagnostic,
    resolve_r2yz_dx,
)
from ovb_sense.errors import (
    InputError,
    InvalidCorrelation,
    InvalidInput,
    MultipleBenchmarkCovariatesUnsupported,
    ZeroBenchmarkAssociation,
)
from ovb_sense.oracle import DgpConfig, definitional_k, generate, oracle_all
from ovb_sense.partial_r2 import PartialQuery, partial_corr, partial_r2
from ovb_sense.regress import Dataset, ModelSpec, coef_summary, fit_ols, residualize
from ovb_sense.sensitivity import r2_from_t

ORTHO = DgpConfig(n=200, k_covariates=3, orthogonalize_z=True)


def _ortho(seed):
    data = generate(ORTHO, seed)
    return data, ORTHO.model


def test_spec_validation():
    with pytest.raises(InputError):
        BenchmarkSpec((), 1, 1)
    with pytest.raises(InputError):
        BenchmarkSpec("x1", -1, 1)
    with pytest.raises(InputError):
        BenchmarkSpec("x1", 1, 1, mode="other")
    data, spec = _ortho(0)
    with pytest.raises(InputError):
        bound_total(data, spec, BenchmarkSpec("z", 1, 1, "total"))
    with pytest.raises(MultipleBenchmarkCovariatesUnsupported):
        bound_total(data, spec, BenchmarkSpec(("x1", "x2"), 1, 1, "total"))


def test_sign_case_classification():
    assert classify_sign_case(SignCase.INCREASE)
    assert classify_sign_case(SignCase.REDUCE_OPPOSITE_SIGN)
    assert not classify_sign_case(SignCase.REDUCE_SAME_SIGN)
    assert SignCase.parse("reduce-same") is SignCase.REDUCE_SAME_SIGN
    with pytest.raises(InputError):
        SignCase.parse("sideways")


@pytest.mark.parametrize("fn,mode", [
    (bound_total, "total"), (bound_partial_single, "partial"), (bound_partial_multiple, "partial"),
])
def test_zero_k_gives_zero_bounds(fn, mode):
    data, spec = _ortho(1)
    b = fn(data, spec, BenchmarkSpec("x1", 0.0, 0.0, mode))
    assert b.r2_dz_x == 0.0 and b.r2_yz_x == 0.0 and not b.clamped


@pytest.mark.parametrize("fn,mode", [
    (bound_total, "total"), (bound_partial_single, "partial"),
])
def test_bounds_are_linear_in_k(fn, mode):
    data, spec = _ortho(2)
    one = fn(data, spec, BenchmarkSpec("x1", 0.1, 0.1, mode))
    two = fn(data, spec, BenchmarkSpec("x1", 0.2, 0.2, mode))
    assert two.r2_dz_x == pytest.approx(2 * one.r2_dz_x, rel=1e-14)
    assert two.r2_yz_x == pytest.approx(2 * one.r2_yz_x, rel=1e-14)


def test_cap_sets_clamped_flag():
    data, spec = _ortho(3)
    b = bound_partial_single(data, spec, BenchmarkSpec("x1", 1e6, 1e6))
    assert b.r2_dz_x == 1.0 and b.r2_yz_x == 1.0 and b.clamped
    r = benchmark_bounds(data, spec, BenchmarkSpec("x1", 1e6, 1e6), 0.1)
    assert r.r2_yz_dx == 1.0 and r.clamped


@pytest.mark.parametrize("mode", ["total", "partial"])
def test_zero_benchmark_association(mode):
    rng = np.random.default_rng(0)
    data = Dataset({c: rng.standard_normal(60) for c in ("y", "d", "x1", "x2")})
    # make x1 exactly uncorrelated with treatment, outcome and x2
    data = data.with_columns(x1=residualize(data, "x1", ["y", "d", "x2"]))
    spec = ModelSpec("y", "d", ("x1", "x2"))
    with pytest.raises(ZeroBenchmarkAssociation):
        benchmark_bounds(data, spec, BenchmarkSpec("x1", 1, 1, mode), 0.1)


def test_single_group_matches_single():
    data, spec = _ortho(4)
    a = bound_partial_single(data, spec, BenchmarkSpec("x2", 0.7, 1.3))
    b = bound_partial_multiple(data, spec, BenchmarkSpec(("x2",), 0.7, 1.3))
    assert abs(a.r2_dz_x - b.r2_dz_x) <= 1e-12 and abs(a.r2_yz_x - b.r2_yz_x) <= 1e-12


@pytest.mark.parametrize("mode,bench", [("total", "x1"), ("partial", "x1"), ("partial", ("x1", "x2"))])
def test_definitional_k_reproduces_direct_partial_r2(mode, bench):
    for seed in range(10):
        data, spec = _ortho(seed)
        k_d, k_y = definitional_k(data, spec, "z", bench, mode)
        b = benchmark_bounds(data, spec, BenchmarkSpec(bench, k_d, k_y, mode), 0.0)
        assert abs(b.r2_dz_x - partial_r2(PartialQuery(data, "d", "z", spec.covariates))) <= 1e-9
        assert abs(b.r2_yz_x - partial_r2(PartialQuery(data, "y", "z", spec.covariates))) <= 1e-9


def test_definitional_k_holds_without_constructed_orthogonality():
    cfg = DgpConfig(n=200, k_covariates=3, covariate_confounder_correlation=0.6)
    for seed in range(10):
        data = generate(cfg, seed)
        k_d, k_y = definitional_k(data, cfg.model, "z", "x1", "partial")
        b = bound_partial_single(data, cfg.model, BenchmarkSpec("x1", k_d, k_y))
        rec = oracle_all(data, cfg.model)
        assert abs(b.r2_dz_x - rec.r2_dz_x) <= 1e-9
        assert abs(b.r2_yz_x - rec.r2_yz_x) <= 1e-9


def test_resolve_examples_and_errors():
    r = resolve_r2yz_dx(0.0, 0.3, 0.0)
    assert r.r2_yz_dx == 0.0 and not r.clamped
    # a zero outcome association with a nonzero product triggers the clamp
    r = resolve_r2yz_dx(0.0, 0.3, 0.2)
    assert r.r2_yz_dx == 0.0 and r.clamped
    r = resolve_r2yz_dx(0.001, 0.5, 0.5)
    assert r.r2_yz_dx == 0.0 and r.clamped
    with pytest.raises(InvalidInput):
        resolve_r2yz_dx(1.0, 0.1, 0.1)
    assert not resolve_r2yz_dx(0.1, 0.1, 0.1, SignCase.REDUCE_SAME_SIGN).exact


def test_bound_result_invariants():
    with pytest.raises(InvalidInput):
        BoundResult(0.1, 0.2, 1.2, True, False)
    with pytest.raises(InvalidInput):
        BoundResult(0.1, 0.2, 0.3, False, False, sign_case=SignCase.INCREASE)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0, 0.99), b=st.floats(0, 0.99), c=st.floats(0, 0.99))
def test_resolve_stays_in_unit_interval(a, b, c):
    r = resolve_r2yz_dx(a, b, c)
    assert 0.0 <= r.r2_yz_dx <= 1.0


@settings(max_examples=500, deadline=None)
@given(a=st.floats(-10, 10), b=st.floats(-10, 10), c=st.floats(-10, 10))
def test_exact_difference_sign_rule(a, b, c):
    bc = b * c
    # near-zero terms make the tolerance, not the signs, decide the comparison
    if bc != 0.0 and min(abs(a - bc), abs(bc)) < 1e-9:
        return
    holds = math.isclose(abs(a - bc), abs(a) - abs(bc), rel_tol=0, abs_tol=1e-12)
    assert difference_is_exact(a, b, c) == holds


def test_lower_bound_diagnostic_examples():
    assert lower_bound_diagnostic(2.0, 0.0, 0.3) == pytest.approx(0.6)
    assert lower_bound_diagnostic(0.25, 0.5, 0.3) == 0.0
    assert lower_bound_diagnostic(0.01, 0.5, 0.3) == 0.0
    with pytest.raises(InvalidCorrelation):
        lower_bound_diagnostic(1.0, 1.0, 0.3)


def test_lower_bound_also_holds_on_outcome_side():
    cfg = DgpConfig(n=200, k_covariates=3, covariate_confounder_correlation=-0.5)
    for seed in range(20):
        data = generate(cfg, seed)
        rest = ("x2", "x3")
        k_y = partial_r2(PartialQuery(data, "y", "z", rest)) / partial_r2(
            PartialQuery(data, "y", "x1", rest))
        r2_bench = partial_r2(PartialQuery(data, "y", "x1", rest))
        r = partial_corr(PartialQuery(data, "z", "x1", rest))
        lb = lower_bound_diagnostic(k_y, r, r2_bench / (1 - r2_bench))
        assert partial_r2(PartialQuery(data, "y", "z", cfg.covariates)) >= lb - 1e-12


def test_darfur_bounds(darfur):
    data, spec = darfur
    s = coef_summary(fit_ols(data, spec), spec.treatment)
    r2_yd = r2_from_t(s.t, s.df)
    part = benchmark_bounds(data, spec, BenchmarkSpec("female", 1, 1, "partial"), r2_yd)
    tot = benchmark_bounds(data, spec, BenchmarkSpec("female", 1, 1, "total"), r2_yd)
    assert abs(100 * part.r2_dz_x - 0.916) <= 0.01
    assert abs(100 * part.r2_yz_dx - 12.464) <= 0.05
    assert abs(100 * tot.r2_dz_x - 0.268) <= 0.01
    assert abs(100 * tot.r2_yz_dx - 25.907) <= 0.10
