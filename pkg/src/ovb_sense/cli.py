"""Command-line entry point: ``ovb-sense analyze | contour | fixtures``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Optional, Sequence

from .benchmark import BenchmarkSpec, SignCase
from .errors import InputError, OVBSenseError
from .io import load_csv
from .oracle import export_fixtures
from .regress import ModelSpec, coef_summary, fit_ols
from .report import contour_grid, render_json, render_text, run_analysis, write_grid_csv
from .sensitivity import RobustnessQuery

SIGN_CASES = ("increase", "reduce-opposite", "reduce-same")


def _split(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--outcome", required=True)
    p.add_argument("--treatment", required=True)
    p.add_argument("--covariates", default="", help="comma-separated column names")
    p.add_argument(
        "--fixed-effects",
        default=None,
        metavar="COL",
        help="integer-coded column expanded into dummy covariates (first level dropped)",
    )
    p.add_argument("--drop-na", action="store_true", help="drop rows with unparseable cells")
    p.add_argument("--q", type=float, default=1.0, help="fraction of the estimate to explain away")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ovb-sense", description="Omitted variable bias sensitivity analysis for OLS"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="robustness values, benchmark bounds and verdicts")
    _add_model_args(a)
    a.add_argument("--benchmark", required=True, help="comma-separated benchmark covariates")
    a.add_argument("--kd", type=float, default=1.0)
    a.add_argument("--ky", type=float, default=1.0)
    a.add_argument("--mode", choices=("total", "partial", "both"), default="both")
    a.add_argument("--sign-case", choices=SIGN_CASES, default="increase")
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--strict", action="store_true", help="fail when the sign case is unresolvable")

    c = sub.add_parser("contour", help="adjusted estimate and t over a confounder-strength grid")
    _add_model_args(c)
    c.add_argument("--steps", type=int, default=21, help="grid points per axis")
    c.add_argument("--max-r2d", type=float, default=0.5)
    c.add_argument("--max-r2y", type=float, default=0.5)
    c.add_argument("--out", required=True)

    f = sub.add_parser("fixtures", help="export seeded synthetic fixtures with a manifest")
    f.add_argument("--seed", type=int, required=True)
    f.add_argument("--out", required=True)
    return parser


def _load(args):
    data = load_csv(args.data, drop_na=args.drop_na)
    covariates = _split(args.covariates)
    if args.fixed_effects:
        covariates += tuple(data.dummy_names(args.fixed_effects))
        data = data.with_dummies(args.fixed_effects)
    spec = ModelSpec(args.outcome, args.treatment, covariates)
    spec.validate(data)
    return data, spec


def _analyze(args) -> int:
    data, spec = _load(args)
    bench = _split(args.benchmark)
    warnings = []
    modes = ("total", "partial") if args.mode == "both" else (args.mode,)
    if args.mode == "both" and len(bench) > 1:
        modes = ("partial",)
        warnings.append("total mode skipped: it takes exactly one benchmark covariate")
    specs = {m: BenchmarkSpec(bench, args.kd, args.ky, m) for m in modes}
    report = run_analysis(
        data,
        spec,
        bm_total=specs.get("total"),
        bm_partial=specs.get("partial"),
        rq=RobustnessQuery(q=args.q, alpha=args.alpha),
        case=SignCase.parse(args.sign_case),
        strict=args.strict,
    )
    if warnings:
        report = dataclasses.replace(report, warnings=report.warnings + tuple(warnings))
    out = render_json(report) if args.format == "json" else render_text(report)
    sys.stdout.write(out)
    return 0


def _contour(args) -> int:
    data, spec = _load(args)
    fit = coef_summary(fit_ols(data, spec), spec.treatment)
    grid = contour_grid(
        fit, args.steps, args.steps, args.max_r2d, args.max_r2y,
        RobustnessQuery(q=args.q, alpha=args.alpha),
    )
    write_grid_csv(grid, args.out)
    return 0


def _fixtures(args) -> int:
    manifest = export_fixtures(args.seed, args.out)
    sys.stdout.write(json.dumps(sorted(manifest["fixtures"])) + "\n")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"analyze": _analyze, "contour": _contour, "fixtures": _fixtures}[args.command]
    try:
        return handler(args)
    except OVBSenseError as exc:
        sys.stderr.write(f"ovb-sense: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    except ValueError as exc:
        # stray argument-domain errors from numpy or scipy count as bad input
        sys.stderr.write(f"ovb-sense: {exc}\n")
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
