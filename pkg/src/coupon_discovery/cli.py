"""Command-line experiment runner.

Subcommands ``analytic``, ``simulate``, ``sweep``, ``fit`` and ``plot``.
Experiment fields come from ``--config`` (JSON, see
``schema/experiment.schema.json``) and can be overridden by flags; a flag
always wins over the file.

Exit codes: 0 success, 2 validation or parse error, 3 fit did not converge.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .errors import DiscoveryError
from .experiment import (
    ExperimentSpec,
    parse_sweep,
    run_analytic,
    run_fit,
    run_simulate,
    run_sweep,
    spec_from_overrides,
)
from .fit import MODEL_KINDS, SATURATING_EXPONENTIAL
from .svg import PlotStyle, emit_svg
from .table import Table, pivot_long

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def _quality(text: str):
    if text in ("aligned", "anti_aligned"):
        return text
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("quality must be aligned, anti_aligned or comma-separated numbers") from None


def _global_flags() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--config", help="experiment JSON file")
    g.add_argument("--seed", type=_u64, help="master seed (unsigned 64-bit)")
    g.add_argument("--out", help="CSV (or report) output path; default stdout")
    g.add_argument("--svg", help="also write an SVG line plot here")
    return g


def _experiment_flags() -> argparse.ArgumentParser:
    e = argparse.ArgumentParser(add_help=False)
    e.add_argument("--M", type=int, dest="M", help="universe size")
    e.add_argument("--T", type=int, dest="T", help="horizon in steps")
    e.add_argument("--n-runs", type=int, help="Monte Carlo runs")
    e.add_argument("--workers", type=int, help="parallel simulation workers")
    e.add_argument("--prior", choices=("uniform", "binomial"), help="prior family")
    e.add_argument("--p", type=float, help="binomial prior parameter (implies --prior binomial)")
    e.add_argument("--r", type=float, help="symmetric channel crossover probability")
    e.add_argument("--initial-set", type=_int_list, help="comma-separated 1-based indices")
    e.add_argument("--rho0", type=float, help="initially known fraction (elements 1..rho0*M)")
    e.add_argument("--quality", type=_quality, help="aligned, anti_aligned or comma-separated values")
    e.add_argument("--sweep", help="NAME=V1,V2,... with NAME in r, p, rho0, M")
    return e


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coupon-discovery", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    g, e = _global_flags(), _experiment_flags()
    sub.add_parser("analytic", parents=[g, e], help="closed-form expected curves")
    sub.add_parser("simulate", parents=[g, e], help="Monte Carlo ensemble against the closed form")
    sub.add_parser("sweep", parents=[g, e], help="long-format single-parameter sweep")
    f = sub.add_parser("fit", parents=[g], help="fit a growth model to a t,value CSV")
    f.add_argument("series", help="CSV with a t column and a value column")
    f.add_argument("--model", choices=MODEL_KINDS, default=SATURATING_EXPONENTIAL)
    f.add_argument("--capacity-hint", type=float, help="initial guess for the limiting size K")
    f.add_argument("--column", help="value column (default: 'value', else the first after t)")
    p = sub.add_parser("plot", parents=[g], help="render a CSV table as an SVG line plot")
    p.add_argument("table", help="CSV with a t column")
    p.add_argument("--columns", help="comma-separated series columns (default: all)")
    p.add_argument("--value", default="analytic_size", help="value column to plot for long sweep tables")
    p.add_argument("--title")
    return parser


def _spec(args) -> ExperimentSpec:
    base = ExperimentSpec.from_json_file(args.config) if args.config else None
    o = {}
    for name in ("M", "T", "n_runs", "workers", "seed", "initial_set", "rho0", "quality"):
        v = getattr(args, name, None)
        if v is not None:
            o[name] = v
    if args.prior == "uniform":
        o["prior"] = {"kind": "uniform"}
    if args.p is not None or args.prior == "binomial":
        p = args.p if args.p is not None else (base.prior.get("p") if base else None)
        if p is None:
            raise DiscoveryError("--prior binomial needs --p")
        o["prior"] = {"kind": "binomial", "p": p}
    if args.r is not None:
        o["channel"] = {"kind": "symmetric", "r": args.r}
    if args.sweep:
        o["sweep"] = parse_sweep(args.sweep)
    if base is None and "M" not in o:
        raise DiscoveryError("$.M: give --config or --M")
    return spec_from_overrides(base, o)


def _write_text(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_table(table: Table, args, spec: Optional[ExperimentSpec] = None, title: Optional[str] = None) -> None:
    targets = [(args.out, args.svg)]
    if spec is not None and not args.out and not args.svg and spec.outputs:
        targets = [(o.get("csv"), o.get("svg")) for o in spec.outputs]
    for csv_path, svg_path in targets:
        if csv_path or not svg_path:
            _write_text(table.to_csv(), csv_path)
        if svg_path:
            plot_table = pivot_long(table, "analytic_size") if "sweep_name" in table.columns else table
            _write_text(emit_svg(plot_table, PlotStyle(title=title)), svg_path)


def _cmd_experiment(args) -> int:
    spec = _spec(args)
    if args.command == "analytic":
        table = run_analytic(spec)
    elif args.command == "simulate":
        table = run_simulate(spec)
    else:
        table = run_sweep(spec)
    _emit_table(table, args, spec, title=args.command)
    return EXIT_OK


def _cmd_fit(args) -> int:
    table = Table.read_csv(args.series)
    report = run_fit(table, args.model, args.capacity_hint, args.column, source=args.series)
    text = "\n".join(report.lines()) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, indent=2)
            fh.write("\n")
    if args.svg:
        _write_text(emit_svg(_fit_table(table, report), PlotStyle(title=f"{report.fit.model_kind} fit")), args.svg)
    if not report.fit.converged:
        sys.stderr.write(f"fit did not converge after {report.fit.iterations} iterations "
                         f"(rmse {report.fit.rmse!r})\n")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _fit_table(table: Table, report) -> Table:
    t = table.column("t")
    observed = table.column(report.column)
    fitted = report.fit.predict(t).tolist()
    return Table(["t", "observed", "fitted"], [list(r) for r in zip(t, observed, fitted)])


def _cmd_plot(args) -> int:
    table = Table.read_csv(args.table)
    if "sweep_name" in table.columns:
        table = pivot_long(table, args.value)
    cols = [c for c in args.columns.split(",") if c] if args.columns else None
    svg = emit_svg(table, PlotStyle(title=args.title, columns=cols))
    _write_text(svg, args.svg or args.out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "plot":
            return _cmd_plot(args)
        return _cmd_experiment(args)
    except DiscoveryError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
