"""Command-line entry point: ``subspace-doa run --preset fig5 --out results/``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .experiment import PRESET_NAMES, ExperimentConfig, preset, run_experiment

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ALL_DIVERGED = 2


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors (exit 1); 2 is reserved for divergence
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="subspace-doa",
        description="Neural MCA/PCA learning rules for direction-of-arrival estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write CSV/JSON outputs")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESET_NAMES, metavar="NAME", help="one of: " + ", ".join(PRESET_NAMES))
    src.add_argument("--config", metavar="PATH", help="JSON experiment config")
    run.add_argument("--out", metavar="DIR", help="output directory (default: config output_dir or results/<name>)")
    run.add_argument("--seed", type=int, help="override the experiment seed")
    run.add_argument("--trials", type=int, help="override the number of trials per variant")
    run.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("presets", help="list preset names")
    return parser


def _load_config(args) -> ExperimentConfig:
    cfg = preset(args.preset) if args.preset else ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, num_trials=args.trials)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        print("\n".join(PRESET_NAMES))
        return EXIT_OK

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load_config(args)
    except (ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    out = args.out or cfg.output_dir or f"results/{cfg.name}"
    try:
        report = run_experiment(cfg, out)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(report.summary_table())
    print(f"wrote {', '.join(report.files)} to {out}")
    if all(r.status == "diverged" for r in report.records):
        print("error: every trial diverged", file=sys.stderr)
        return EXIT_ALL_DIVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
