"""Command-line entry point: ``cslag run <config> [options]``.

Exit codes: 0 on completion, 2 on configuration errors, 3 when a run aborts
on a CFL violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .flux import CflViolation
from .scenarios import ConfigError, parse_config, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CFL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cslag",
        description="Conservative semi-Lagrangian advection scenarios")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario from a config file")
    run.add_argument("config", help="path to the scenario config file")
    run.add_argument("--threads", type=int, default=None, metavar="N",
                     help="cap on worker parallelism (the reference "
                          "implementation executes sequentially; the value "
                          "is validated and recorded in the metadata)")
    run.add_argument("--output", default=None, metavar="DIR",
                     help="override the configured output directory")
    run.add_argument("--literal-paper-mode", action="store_true",
                     help="run limiters in their verbatim printed form")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.output is not None:
            cfg = replace(cfg, output_dir=args.output)
        if args.threads is not None:
            cfg = replace(cfg, threads=args.threads)
        if args.literal_paper_mode:
            lit = replace(cfg.limiter, literal_paper_mode=True)
            cfg = replace(cfg, limiter=lit)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_scenario(cfg)
    except CflViolation as exc:
        print(f"aborted on CFL violation: {exc}", file=sys.stderr)
        return EXIT_CFL
    print(f"completed {result.completed_steps} steps; "
          f"outputs in {result.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
