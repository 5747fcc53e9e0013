"""Command line front end.

    cornerwalk <command> [--config FILE] [--seed N] [--workers N]
                         [--out DIR] [--plots]

Commands run one experiment each and write the result JSON, side tables, and
optional SVG figures into the output directory.  ``config-reference`` prints
a fully commented INI with every key at its default.  Validation and budget
errors exit with status 2.
"""

from __future__ import annotations

import argparse
import sys

from .config import ExperimentConfig, load_config, reference_ini
from .errors import CornerwalkError
from . import experiments

_RUNNERS = {
    "sample": experiments.run_sample,
    "dims": experiments.run_dims,
    "continuity": experiments.run_continuity_sweep,
    "gap": experiments.run_gap_test,
    "harnack": experiments.run_harnack_scan,
    "delta": experiments.run_delta_decay,
    "oracle-compare": experiments.run_oracle_compare,
}

_SUMMARY_KEYS = {
    "sample": ("n_effective", "discarded"),
    "dims": ("estimate", "uncertainty", "dim_set"),
    "gap": ("estimate", "uncertainty", "dim_set", "gap_sigmas", "passed"),
    "continuity": ("monotone_within_ci", "lipschitz_trend", "ratio_bound"),
    "harnack": ("q_hat", "r2", "decaying"),
    "delta": ("delta_root", "decreasing_root"),
    "oracle-compare": ("max_abs_diff", "cells_outside_ci"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cornerwalk",
        description="harmonic-measure experiments on four-corner Cantor sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="INI file; defaults apply where silent")
        p.add_argument("--seed", type=int, help="override the campaign seed")
        p.add_argument("--workers", type=int, help="worker processes for walker batches")
        p.add_argument("--out", help="output directory (default: config out_dir)")
        p.add_argument("--plots", action="store_true", help="also render SVG figures")
    sub.add_parser("config-reference", help="print the commented default config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "config-reference":
        print(reference_ini(), end="")
        return 0
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.out is not None:
            overrides["out_dir"] = args.out
        if args.plots:
            overrides["plots"] = True
        if overrides:
            cfg = cfg.overridden(**overrides)
        result = _RUNNERS[args.command](cfg, out_dir=cfg.out_dir)
    except CornerwalkError as exc:
        print(f"cornerwalk: {exc}", file=sys.stderr)
        return 2
    print(f"{args.command}: done in {result.wall_clock_s:.2f}s")
    for key in _SUMMARY_KEYS.get(args.command, ()):
        if key in result.metrics:
            print(f"  {key} = {result.metrics[key]}")
    for name in result.files:
        print(f"  wrote {name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
