"""Command line front end: noisy-search <scenario> [options]."""

from __future__ import annotations

import argparse
import sys

from .graph import GraphFormatError
from .harness import (
    SCENARIOS,
    ExperimentConfig,
    adversarial_sweep,
    run_experiment,
)
from .mathcore import DomainError
from .oracle import ProtocolError

LIE_CHOICE_ALIASES = {
    "uniform": "uniform-wrong",
    "adversarial": "adversarial-heaviest",
    "uniform-wrong": "uniform-wrong",
    "adversarial-heaviest": "adversarial-heaviest",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisy-search",
        description="Simulate noisy target search strategies and check their bounds.",
    )
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--n", type=int, required=True, help="search space size")
    parser.add_argument("--p", type=float, required=True, help="per-answer error rate")
    parser.add_argument("--delta", type=float, required=True, help="confidence threshold")
    parser.add_argument("--trials", type=int, required=True)
    parser.add_argument("--seed", type=int, required=True)
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--graph", help="graph file path")
    group.add_argument("--gen", help="built-in graph generator name")
    parser.add_argument(
        "--mu", default="uniform", help="distribution file path or 'uniform'"
    )
    parser.add_argument(
        "--lie-choice", default="uniform", choices=sorted(LIE_CHOICE_ALIASES)
    )
    parser.add_argument("--c-const", type=float, default=4.0)
    parser.add_argument("--c-prime", type=float, default=64.0)
    parser.add_argument("--out", required=True, help="output file path")
    parser.add_argument("--format", default="csv", choices=("csv", "json"))
    parser.add_argument("--keep-transcripts", action="store_true")
    parser.add_argument(
        "--sweep", action="store_true",
        help="run once per fixed target and report each (n <= 256)",
    )
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    mu_path = None if args.mu == "uniform" else args.mu
    return ExperimentConfig(
        scenario=args.scenario,
        n=args.n,
        p=args.p,
        delta=args.delta,
        trials=args.trials,
        seed=args.seed,
        graph_path=args.graph,
        gen=args.gen,
        mu_path=mu_path,
        mu_name="uniform" if mu_path is None else "file",
        lie_choice=LIE_CHOICE_ALIASES[args.lie_choice],
        c_const=args.c_const,
        c_prime=args.c_prime,
        output=args.out,
        fmt=args.format,
        keep_transcripts=args.keep_transcripts,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        if args.sweep:
            results = adversarial_sweep(config)
        else:
            results = [run_experiment(config)]
    except (DomainError, GraphFormatError, ProtocolError, OSError) as exc:
        print(f"noisy-search: error: {exc}", file=sys.stderr)
        return 2
    ok = all(r.bound_satisfied for r in results)
    for r in results:
        target = r.extras.get("target")
        label = f"{r.scenario}[target={target}]" if target is not None else r.scenario
        print(
            f"{label}: n={r.n} p={r.p} delta={r.delta} trials={r.trials} "
            f"mean_queries={r.mean_queries:.2f} error_rate={r.error_rate:.4f} "
            f"bound={r.theoretical_bound:.4f} satisfied={r.bound_satisfied}"
        )
    if not ok:
        print("noisy-search: bound violated", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
