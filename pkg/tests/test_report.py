import json
import re

import pytest

from ovb_sense.benchmark import BenchmarkSpec, SignCase
from ovb_sense.errors import InvalidGrid, UnresolvableSignCase
from ovb_sense.io import load_csv
from ovb_sense.oracle import oracle_rv
from ovb_sense.regress import ModelSpec, coef_summary, fit_ols
from ovb_sense.report import (
    GRID_HEADER,
    contour_grid,
    detail_values,
    render_json,
    render_text,
    run_analysis,
    write_grid_csv,
)
from ovb_sense.sensitivity import RobustnessQuery, robustness_value

from conftest import ORACLE_DIR

MANIFEST = json.loads((ORACLE_DIR / "manifest.json").read_text())


def _fixture(name):
    entry = MANIFEST["fixtures"][name]
    m = entry["model"]
    spec = ModelSpec(m["outcome"], m["treatment"], tuple(m["covariates"]))
    return load_csv(ORACLE_DIR / entry["file"]), spec, entry


@pytest.mark.parametrize("name", sorted(MANIFEST["fixtures"]))
def test_report_matches_oracle_fixture(name):
    data, spec, entry = _fixture(name)
    exp = entry["expected"]
    case = SignCase(exp["sign_case"])
    bench = MANIFEST["benchmark"]
    rep = run_analysis(
        data, spec,
        bm_total=BenchmarkSpec(bench, *entry["k_total"], mode="total"),
        bm_partial=BenchmarkSpec(bench, *entry["k_partial"], mode="partial"),
        case=case,
    )
    tol = 1e-8
    assert abs(rep.estimate - exp["tau_res"]) <= tol
    assert abs(rep.se - exp["se_res"]) <= tol
    assert abs(rep.r2_yd_x_pct / 100 - exp["r2_yd_x"]) <= tol
    assert abs(rep.rv_q_pct / 100 - oracle_rv(exp["t_res"], exp["df_res"], 1.0)) <= tol
    for mode in (rep.total_mode, rep.partial_mode):
        assert abs(mode.r2_dz_x_pct / 100 - exp["r2_dz_x"]) <= tol
        assert abs(mode.r2_yz_x_pct / 100 - exp["r2_yz_x"]) <= tol
        if case is SignCase.REDUCE_SAME_SIGN:
            assert not mode.exact
            assert mode.r2_yz_dx_pct / 100 <= exp["r2_yz_dx"] + tol
        else:
            assert mode.exact
            assert abs(mode.r2_yz_dx_pct / 100 - exp["r2_yz_dx"]) <= tol
    if case is SignCase.REDUCE_SAME_SIGN:
        assert rep.warnings


def test_zero_k_is_robust_everywhere():
    data, spec, _ = _fixture("increase")
    rep = run_analysis(
        data, spec,
        bm_total=BenchmarkSpec("x1", 0, 0, "total"),
        bm_partial=BenchmarkSpec("x1", 0, 0, "partial"),
    )
    for mode in (rep.total_mode, rep.partial_mode):
        assert mode.r2_dz_x_pct == 0 and mode.r2_yz_dx_pct == 0
    for v in rep.verdicts.values():
        assert v.point_estimate_robust and v.ci_robust and v.extreme_scenario_safe


def test_requires_a_benchmark():
    data, spec, _ = _fixture("increase")
    with pytest.raises(ValueError):
        run_analysis(data, spec)


def test_strict_mode_raises_for_same_sign_case():
    data, spec, _ = _fixture("reduce_same_sign")
    bm = BenchmarkSpec("x1", 1, 1)
    with pytest.raises(UnresolvableSignCase):
        run_analysis(data, spec, bm_partial=bm, case=SignCase.REDUCE_SAME_SIGN, strict=True)
    rep = run_analysis(data, spec, bm_partial=bm, case=SignCase.REDUCE_SAME_SIGN)
    assert any("lower bound" in w for w in rep.warnings)
    assert rep.metadata["exact"] == {"partial": False}


def test_percent_fields_scale_fractions(darfur):
    data, spec = darfur
    rep = run_analysis(data, spec, bm_partial=BenchmarkSpec("female", 1, 1))
    s = coef_summary(fit_ols(data, spec), spec.treatment)
    assert rep.rv_q_pct == 100 * robustness_value(s.t, s.df)
    assert rep.metadata["k_d"] == {"partial": 1}
    assert rep.metadata["benchmark_covariates"] == {"partial": ["female"]}


def test_text_and_json_agree_to_six_digits(darfur):
    data, spec = darfur
    rep = run_analysis(
        data, spec,
        bm_total=BenchmarkSpec("female", 1, 1, "total"),
        bm_partial=BenchmarkSpec("female", 1, 1, "partial"),
    )
    text = render_text(rep)
    shown = dict(re.findall(r"^  (\S+) = (\S+)$", text, re.MULTILINE))
    blob = json.loads(render_json(rep))

    def from_json(key):
        if "." not in key:
            return blob[key]
        mode, field = key.split(".")
        if field.startswith("margin"):
            return blob["verdicts"][mode][field]
        return blob[f"{mode}_mode"][field]

    keys = set(detail_values(rep))
    assert keys <= set(shown)
    for key in keys:
        assert f"{from_json(key):.6g}" == shown[key], key
    # the table row is the same numbers at three decimals
    assert f"{blob['rv_q_pct']:.3f}" in text
    assert f"{blob['partial_mode']['r2_yz_dx_pct']:.3f}" in text


def _fit():
    data, spec, _ = _fixture("increase")
    return coef_summary(fit_ols(data, spec), spec.treatment)


def test_grid_origin_and_shape():
    fit = _fit()
    grid = contour_grid(fit, 2, 2, 0.5, 0.5)
    assert grid.shape == (4, 4)
    assert abs(grid[0, 2] - fit.estimate) <= 1e-12 and abs(grid[0, 3] - fit.t) <= 1e-12
    # row-major: second row moves along the outcome axis
    assert tuple(grid[1, :2]) == (0.0, 0.5) and tuple(grid[2, :2]) == (0.5, 0.0)


def test_grid_vanishes_at_robustness_value():
    fit = _fit()
    rv = robustness_value(fit.t, fit.df)
    grid = contour_grid(fit, 2, 2, rv, rv)
    assert abs(grid[3, 2]) <= 1e-8


@pytest.mark.parametrize("args", [(1, 3, 0.5, 0.5), (3, 3, 1.0, 0.5), (3, 3, 0.5, 1.5), (3, 3, 0.0, 0.5)])
def test_invalid_grid(args):
    with pytest.raises(InvalidGrid):
        contour_grid(_fit(), *args)


def test_grid_csv(tmp_path):
    grid = contour_grid(_fit(), 3, 2, 0.3, 1.0, RobustnessQuery())
    path = tmp_path / "out" / "grid.csv"
    write_grid_csv(grid, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(GRID_HEADER)
    assert len(lines) == 7
