"""Command-line entry point.

Subcommands:
  point    run one parameter point, CSV to --out or stdout
  sweep    run the configured (kappa or g) sweep, CSV to --out
  wigner   render the post-measurement Wigner field as x,p,W CSV
  circuit  tabulate (xi0, omega_cutoff, kappa) against the coupling element

Exit codes: 0 success, 1 configuration error, 2 completed with failed rows.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import parse_config
from .errors import ConfigError, DscqedError
from .runner import circuit_csv, format_csv, run_point, run_sweep, wigner_csv


def _default_jobs() -> int:
    raw = os.environ.get("DSC_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dscqed", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("point", "sweep", "wigner", "circuit"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a key=value config file")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--jobs", type=int, default=_default_jobs(),
                       help="worker pool size for sweeps (env DSC_JOBS)")
        p.add_argument("--backend", choices=("cvs", "diag", "both"),
                       help="override the configured backend")
    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.backend:
        from dataclasses import replace
        cfg = replace(cfg, backend=args.backend)

    try:
        if args.command == "point":
            rows = run_point(cfg)
            _emit(format_csv(rows, cfg), args.out)
            return 2 if any(r.error for r in rows) else 0
        if args.command == "sweep":
            text, n_err = run_sweep(cfg, jobs=args.jobs)
            _emit(text, args.out)
            return 2 if n_err else 0
        if args.command == "wigner":
            _emit(wigner_csv(cfg), args.out)
            return 0
        _emit(circuit_csv(cfg), args.out)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DscqedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
