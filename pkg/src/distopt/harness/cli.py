"""Command line entry point: ``distopt run | sweep | report | acceptance``."""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from ..errors import DistOptError
from .config import load_config
from .export import export, read_json
from .runner import run_experiment
from .sweep import sweep


def _acceptance(only=None) -> bool:
    from ..acceptance import run_all

    return all(r.passed for r in run_all(only))


def cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_experiment(config)
    formats = config.get("output", {}).get("formats", ["csv", "json"])
    paths = export(result, args.out, formats)
    final = result.trace.final
    print(f"{config['algorithm']['name']}: {len(result.traces)} run(s), final subopt {final.subopt:.6e}, "
          f"rounds {final.comm_rounds}; wrote {len(paths)} file(s) to {args.out}")
    return 0


def cmd_sweep(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        spec = json.load(fh)
    result = sweep(spec)
    export(result, args.out, spec["base"].get("output", {}).get("formats", ["csv", "json"]))
    failed = sum(c.error is not None for c in result.cells)
    print(f"{len(result.cells)} cell(s), {failed} failed, {len(result.fits)} fit(s); wrote {args.out}")
    _print_fits([f.to_dict() for f in result.fits])
    return 0


def _print_fits(fits):
    if not fits:
        return
    print(f"{'x':<28} {'y':<28} {'slope':>9} {'stderr':>9} {'points':>6}")
    for f in fits:
        print(f"{f['x_name']:<28} {f['y_name']:<28} {f['slope']:>9.4f} {f['stderr']:>9.4f} {f['points']:>6d}")


def cmd_report(args) -> int:
    summary = os.path.join(args.input, "sweep.json")
    if os.path.exists(summary):
        with open(summary, encoding="utf-8") as fh:
            data = json.load(fh)
        _print_fits(data["fits"])
        for s in data.get("skipped", []):
            print(f"skipped fit {s['fit']}: {s['reason']}")
        return 0
    files = sorted(glob.glob(os.path.join(args.input, "**", "trace_*.json"), recursive=True))
    if not files:
        print(f"no traces or sweep summary under {args.input}", file=sys.stderr)
        return 1
    print(f"{'file':<40} {'algorithm':<28} {'rounds':>8} {'comm':>10} {'subopt':>14}")
    for path in files:
        trace, _ = read_json(path)
        fin = trace.final
        print(f"{os.path.relpath(path, args.input):<40} {trace.algorithm:<28} {fin.round:>8d} {fin.comm_rounds:>10d} {fin.subopt:>14.6e}")
    return 0


def cmd_acceptance(args) -> int:
    return 0 if _acceptance(args.only) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("sweep", help="run a grid {base, vary, fits} and fit slopes")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("report", help="print the slope table (or final values) of an output directory")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_report)
    p = sub.add_parser("acceptance", help="run the acceptance suite")
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers")
    p.set_defaults(func=cmd_acceptance)
    for name in ("run", "sweep", "report"):
        sub.choices[name].add_argument("--assert", dest="check", action="store_true",
                                       help="also run the acceptance suite; exit 1 on any failure")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except (DistOptError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "check", False) and not _acceptance():
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
