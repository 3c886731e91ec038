"""Command-line entry point: run, validate, and version subcommands.

Exit codes: 0 on success, 2 on configuration/validation problems, 1 on
runtime failures (numerical breakdown, resource caps, I/O).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import NumericalError, ResourceLimitError, ValidationError
from .scenario import (
    build_summary,
    emit_summary,
    emit_trajectory,
    parse_scenario,
    run_scenario,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antizeno",
        description=(
            "Simulate and optimize sequences of projective quantum "
            "measurements (with optional coherent control) that steer a "
            "state toward a target observable."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario config and write outputs")
    run.add_argument("config", help="path to a scenario YAML document")
    run.add_argument(
        "--output-dir",
        default=".",
        help="directory for trajectory/summary files (created if missing)",
    )
    run.add_argument(
        "--seed", type=int, default=None, help="override the config's optimizer seed"
    )
    run.add_argument(
        "--quiet", action="store_true", help="suppress progress output"
    )

    val = sub.add_parser("validate", help="parse and validate a scenario config")
    val.add_argument("config", help="path to a scenario YAML document")
    val.add_argument("--quiet", action="store_true", help="suppress the OK line")

    sub.add_parser("version", help="print the package version")
    return parser


def _load_config(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    return parse_scenario(text)


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ValidationError(f"--seed must be >= 0, got {args.seed}")
        cfg = replace(cfg, optimizer=replace(cfg.optimizer, seed=args.seed))

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trajectory_path = out_dir / cfg.output.trajectory_path
    summary_path = out_dir / cfg.output.summary_path

    start = time.perf_counter()
    outcome, records = run_scenario(cfg)
    wall = time.perf_counter() - start

    emit_trajectory(records, trajectory_path, dim=cfg.dim)
    summary = build_summary(outcome, cfg, records, wall)
    emit_summary(summary, summary_path)

    if not args.quiet:
        print(f"mode: {cfg.mode}")
        print(f"best_value: {summary['best_value']:.12g}")
        print(f"trajectory: {trajectory_path}")
        print(f"summary: {summary_path}")
    return 0


def _cmd_validate(args) -> int:
    _load_config(args.config)
    if not args.quiet:
        print(f"{args.config}: OK")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "version":
        print(__version__)
        return 0
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ResourceLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
