"""Command-line interface.

Subcommands::

    ratos run <config> [--engine polariton|mb] [--out FILE]
    ratos sweep <config> --param KEY --values v1,v2,... [--out DIR]
    ratos fit ratos-energy <summary.json>
    ratos validate <config>

Exit codes: 0 success, 1 usage/config error, 2 physics/grid/fit error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .analysis import ratos_energy_fit
from .config import load_config
from .errors import (
    AccuracyError,
    ConfigError,
    DomainError,
    FitError,
    GridError,
    ProtocolError,
    ResolutionError,
    ScheduleSyntaxError,
)
from .io import emit_csv, emit_summary
from .protocols import run as run_experiment

_USAGE_ERRORS = (ConfigError, ScheduleSyntaxError, DomainError, OSError, ValueError, KeyError)
_PHYSICS_ERRORS = (GridError, AccuracyError, ProtocolError, ResolutionError, FitError)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _cmd_run(args) -> int:
    doc = load_config(_read(args.config))
    spec = doc.spec
    if args.engine:
        spec = dataclasses.replace(spec, engine=args.engine)
    result = run_experiment(spec)
    if args.out:
        emit_csv(result.waveform, args.out)
        print(f"waveform written to {args.out}")
    for key in sorted(result.scalars):
        print(f"{key} = {_fmt(result.scalars[key])}")
    return 0


def _cmd_sweep(args) -> int:
    text = _read(args.config)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        print(f"error: --values expects comma-separated numbers, got {args.values!r}",
              file=sys.stderr)
        return 1
    if not values:
        print("error: --values is empty", file=sys.stderr)
        return 1
    os.makedirs(args.out, exist_ok=True)

    runs = []
    doc = None
    for i, value in enumerate(values):
        doc = load_config(text, overrides={args.param: value})
        spec = doc.spec
        if args.engine:
            spec = dataclasses.replace(spec, engine=args.engine)
        result = run_experiment(spec)
        csv_name = f"run_{i:03d}.csv"
        emit_csv(result.waveform, os.path.join(args.out, csv_name))
        metrics = {k: v for k, v in sorted(result.scalars.items())}
        runs.append({"value": value, "csv": csv_name, "metrics": metrics})
    summary_path = os.path.join(args.out, "summary.json")
    emit_summary(summary_path, args.param, values, runs, doc.entries, doc.spec.pump_power)
    print(f"{len(values)} runs written to {args.out} (summary: {summary_path})")
    return 0


def _cmd_fit(args) -> int:
    with open(args.summary, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        p_pump = float(doc["pump_power_mw"])
        values = [float(r["value"]) for r in doc["runs"]]
        energies = [float(r["metrics"]["e1_energy_norm"]) for r in doc["runs"]]
    except (KeyError, TypeError) as exc:
        print(f"error: summary file lacks required field: {exc}", file=sys.stderr)
        return 1
    fit = ratos_energy_fit(p_pump, values, energies)
    a, c = fit.params
    print(f"a = {a:.6g}")
    print(f"c = {c:.6g}")
    print(f"a/c = {a / c:.6g}")
    print(f"r2 = {fit.r2:.6g}")
    return 0


def _cmd_validate(args) -> int:
    load_config(_read(args.config))
    print("OK")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratos",
        description="Double-lambda EIT pulse simulator: slow light, storage, "
        "and adiabatic frequency conversion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--engine", choices=("polariton", "mb"))
    p_run.add_argument("--out", help="write the output waveform CSV here")
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="re-run a config over a list of values")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True, help="config key, e.g. control.retrieve.power")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--engine", choices=("polariton", "mb"))
    p_sweep.add_argument("--out", default="sweep_out", help="output directory")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_fit = sub.add_parser("fit", help="fit a model to a sweep summary")
    p_fit.add_argument("model", choices=("ratos-energy",))
    p_fit.add_argument("summary")
    p_fit.set_defaults(fn=_cmd_fit)

    p_val = sub.add_parser("validate", help="parse a config without running it")
    p_val.add_argument("config")
    p_val.set_defaults(fn=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.fn(args)
    except _PHYSICS_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, FitError) and exc.trace:
            for (params, cost) in exc.trace[-5:]:
                print(f"  trace: params={params} cost={cost:.6g}", file=sys.stderr)
        return 2
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
