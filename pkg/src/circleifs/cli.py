"""Command-line entry point: ``circleifs <command> --config cfg.json --output dir``."""

from __future__ import annotations

import argparse
import json
import sys

from .config import EXPERIMENTS, ConfigError, parse_config
from .ifs_core import validate_system
from .runner import EXIT_CAPACITY, EXIT_CONFIG, EXIT_OK, run_config
from .transfer_ops import CapacityError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circleifs", description="Random dynamics of circle homeomorphisms.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate",) + EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment" if name != "validate" else "check a config and its system")
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--output", default=None, help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=None, help="worker threads where supported")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except OSError as exc:
        print(f"config error: <file>: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config error: <file>: invalid JSON at line {exc.lineno}: {exc.msg}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and isinstance(doc, dict):
        doc["seed"] = args.seed
    try:
        cfg = parse_config(doc, None if args.command == "validate" else args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        report = validate_system(cfg.system)
        print(json.dumps(report.to_dict(), indent=2))
        return EXIT_OK if report.valid else EXIT_CONFIG

    if args.threads is not None and args.threads < 1:
        print("config error: --threads: must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        outcome = run_config(cfg, args.output, args.threads)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    print(json.dumps(outcome.summary["metrics"], indent=2, default=str))
    print(f"wrote {outcome.output_dir}", file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
