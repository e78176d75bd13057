"""Command-line front-end: run campaigns, list problems, compute the
uncontrolled Lorenz reward baselines.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .benchmarks import PROBLEMS
from .errors import PbOptError
from .harness import OPTIMIZERS, load_config, run_experiment
from .lorenz import LorenzConfig, integrate, uncontrolled_rewards, write_trajectory_csv


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="pbopt",
        description="Black-box optimization campaigns: policy-based search "
                    "with full-covariance distributions plus ES baselines.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a campaign described by a JSON config")
    run.add_argument("--config", required=True, help="path to the JSON config")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--runs", type=int, help="override the number of runs")
    run.add_argument("--out", help="override the output directory")
    run.add_argument("--workers", type=int,
                     help="parallel run workers (wall time only, never results)")

    sub.add_parser("list", help="list known problems and optimizers")

    baseline = sub.add_parser(
        "baseline", help="uncontrolled Lorenz reward levels over the controlled window")
    baseline.add_argument("--csv", help="also export the uncontrolled trajectory")
    return parser


def _cmd_run(args):
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        config = replace(config, **overrides)
    logs = run_experiment(config)
    best = min(log.best_cost for log in logs)
    print(f"{config.problem}/{config.optimizer}: {config.runs} run(s), "
          f"{config.generations} generations, best cost {best:.6g}")
    print(f"outputs written to {config.out_dir}")


def _cmd_list(_args):
    print("problems:")
    for name, p in sorted(PROBLEMS.items()):
        box = f"[{p.lower[0]:g}, {p.upper[0]:g}]^{p.dim}"
        print(f"  {name:<18} d={p.dim:<3} domain {box}")
    print("optimizers:")
    for name in OPTIMIZERS:
        print(f"  {name}")


def _cmd_baseline(args):
    config = LorenzConfig()
    stab, osc = uncontrolled_rewards(config)
    print(f"stabilizer reward (u=0): {stab:.4f}")
    print(f"oscillator sign changes (u=0): {osc}")
    if args.csv:
        write_trajectory_csv(integrate(config), args.csv)
        print(f"uncontrolled trajectory written to {args.csv}")


def main(argv=None):
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "list": _cmd_list, "baseline": _cmd_baseline}
    try:
        handlers[args.command](args)
    except PbOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
