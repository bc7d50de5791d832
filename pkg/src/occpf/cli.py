"""``sim`` command-line entry point."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import NumericalError, OccpfError, ParameterError, ParseError, ValidationError
from .kernels import backend
from .planner import MODES, parse_mode
from .report import render_plots, write_metrics, write_trace
from .scenario import Scenario, load_scenario, scenario_to_dict
from .sim import COLUMNS, compute_metrics, run_simulation

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_FORMS = ("normalized", "paper-literal")
_METRIC_ROWS = ("max_lateral_deviation", "min_speed", "max_abs_sideslip", "max_abs_yaw",
                "max_abs_steer", "steer_saturation_steps", "steer_sign_changes_post_reveal",
                "stalled", "reveal_time", "alpha1_at_reveal", "alpha2_at_reveal")

log = logging.getLogger("occpf")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sim", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one planner")
    run.add_argument("--scenario", required=True, type=Path)
    run.add_argument("--planner", required=True, choices=[m.lower() for m in MODES])
    run.add_argument("--dt", type=float)
    run.add_argument("--duration", type=float)
    run.add_argument("--out", type=Path, default=Path("out"))
    run.add_argument("--alpha-norm", choices=_FORMS)
    run.add_argument("--exponent-form", choices=_FORMS)
    run.add_argument("--lenient", action="store_true", help="warn on unknown keys instead of failing")

    cmp_ = sub.add_parser("compare", help="simulate all three planners and overlay the results")
    cmp_.add_argument("--scenario", required=True, type=Path)
    cmp_.add_argument("--out", required=True, type=Path)
    cmp_.add_argument("--lenient", action="store_true")

    val = sub.add_parser("validate", help="parse and validate a scenario file")
    val.add_argument("--scenario", required=True, type=Path)
    val.add_argument("--lenient", action="store_true")
    return p


def _apply_overrides(sc: Scenario, args) -> Scenario:
    changes = {}
    if getattr(args, "dt", None) is not None:
        changes["dt"] = args.dt
    if getattr(args, "duration", None) is not None:
        changes["duration"] = args.duration
    if getattr(args, "alpha_norm", None):
        changes["rss"] = replace(sc.rss, alpha_norm=args.alpha_norm)
    if getattr(args, "exponent_form", None):
        changes["pf"] = replace(sc.pf, exponent_form=args.exponent_form)
    return replace(sc, **changes) if changes else sc


def _echo(sc: Scenario, modes: Sequence[str]) -> dict:
    return {"version": __version__, "kernel_backend": backend(), "modes": list(modes),
            "scenario": scenario_to_dict(sc)}


def _run_one(sc: Scenario, mode: str, out: Path):
    trace = run_simulation(sc, mode)
    tag = mode.lower()
    write_trace(trace, out / f"trace_{tag}.csv")
    cols = {name: trace.column(name) for name in COLUMNS}
    metrics = compute_metrics(trace, sc) if trace.rows else None
    return trace, cols, metrics


def cmd_run(args) -> int:
    sc = _apply_overrides(load_scenario(args.scenario, args.lenient), args).calibrated()
    mode = parse_mode(args.planner)
    args.out.mkdir(parents=True, exist_ok=True)
    trace, cols, metrics = _run_one(sc, mode, args.out)
    (args.out / "config.json").write_text(json.dumps(_echo(sc, [mode]), indent=2) + "\n")
    extra = {"valid": {mode: trace.valid}, "error": {mode: trace.error}}
    if metrics is not None:
        write_metrics({mode: metrics}, args.out / "metrics.json", extra)
    if trace.rows:
        render_plots({mode: cols}, args.out / "plots")
    if not trace.valid:
        print(f"numerical failure in {mode}: {trace.error}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"{mode}: {len(trace)} steps -> {args.out}")
    return EXIT_OK


def _table(metrics: dict) -> str:
    modes = list(metrics)
    width = max(len(r) for r in _METRIC_ROWS)
    lines = ["metric".ljust(width) + "".join(m.rjust(14) for m in modes)]
    for row in _METRIC_ROWS:
        cells = []
        for m in modes:
            v = asdict(metrics[m])[row]
            cells.append(("-" if v is None else f"{v:.4g}" if isinstance(v, float) else str(v)).rjust(14))
        lines.append(row.ljust(width) + "".join(cells))
    return "\n".join(lines)


def cmd_compare(args) -> int:
    sc = load_scenario(args.scenario, args.lenient).calibrated()
    args.out.mkdir(parents=True, exist_ok=True)
    all_cols, all_metrics, failed = {}, {}, []
    for mode in MODES:
        trace, cols, metrics = _run_one(sc, mode, args.out)
        if trace.rows:
            all_cols[mode] = cols
        if metrics is not None:
            all_metrics[mode] = metrics
        if not trace.valid:
            failed.append(f"{mode}: {trace.error}")
    (args.out / "config.json").write_text(json.dumps(_echo(sc, MODES), indent=2) + "\n")
    write_metrics(all_metrics, args.out / "metrics.json")
    table = _table(all_metrics)
    (args.out / "report.txt").write_text(table + "\n")
    render_plots(all_cols, args.out / "plots")
    print(table)
    if failed:
        print("numerical failure: " + "; ".join(failed), file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_validate(args) -> int:
    sc = load_scenario(args.scenario, args.lenient)
    print(f"ok: {len(sc.obstacles)} obstacle(s), {sc.road.num_lanes} lane(s), "
          f"dt={sc.dt}, duration={sc.duration}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = _parser().parse_args(argv)
    handler = {"run": cmd_run, "compare": cmd_compare, "validate": cmd_validate}[args.command]
    try:
        return handler(args)
    except (ParseError, ValidationError, ParameterError, ValueError) as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OccpfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
