"""Command-line entry point: ``pfla run | suite | tune``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from .env import RngStream, parse_environment
from .harness import ExperimentConfig, emit_report, run_experiment, run_suite
from .tuning import TuningBudgetExceeded, synthetic_factory, tune_gamma_grid

log = logging.getLogger("pfla")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta", type=float, default=0.99, help="convergence threshold (default 0.99)")
    p.add_argument("--mc-samples", type=int, default=1000, help="Monte Carlo replications per estimate")
    p.add_argument("--reps", type=int, default=10_000, help="independent runs per environment")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=10**6, help="pull limit per run")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument(
        "--estimator",
        choices=("multinomial", "draws"),
        default="multinomial",
        help="how winner counts are sampled; both have the same law (default multinomial)",
    )
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfla", description="Parameter-free learning automaton experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="replicated runs on one environment")
    run_p.add_argument("--env", required=True, help="E1..E9 or a probability list such as 0.9,0.6")
    _common(run_p)
    run_p.add_argument(
        "--exact-two-action",
        action="store_true",
        help="use the closed-form hypothesis probability (two-action environments only)",
    )

    suite_p = sub.add_parser("suite", help="all nine benchmark environments")
    _common(suite_p)

    tune_p = sub.add_parser("tune", help="resolution/perturbation search on a tunable scheme")
    tune_p.add_argument("--scheme", choices=("synthetic",), default="synthetic")
    tune_p.add_argument("--env", required=True)
    tune_p.add_argument("--ne", type=int, default=750, help="consecutive correct runs required")
    tune_p.add_argument("--repeats", type=int, default=20)
    tune_p.add_argument("--gamma-min", type=int, default=None)
    tune_p.add_argument("--gamma-max", type=int, default=None)
    tune_p.add_argument("--seed", type=int, default=0)
    tune_p.add_argument("--budget", type=int, default=10**10, help="interaction budget")
    return parser


def _run(args: argparse.Namespace) -> int:
    env = parse_environment(args.env)
    estimator = "exact" if args.exact_two_action else args.estimator
    config = ExperimentConfig(env, args.eta, args.mc_samples, args.reps, args.seed, args.max_iter, estimator)
    emit_report([run_experiment(config, args.workers)], args.format, args.out)
    return 0


def _suite(args: argparse.Namespace) -> int:
    reports = run_suite(
        args.reps, args.seed, args.eta, args.mc_samples, args.max_iter, args.estimator, args.workers
    )
    emit_report(reports, args.format, args.out)
    return 0


def _tune(args: argparse.Namespace) -> int:
    env = parse_environment(args.env)
    if (args.gamma_min is None) != (args.gamma_max is None):
        raise ValueError("give both --gamma-min and --gamma-max, or neither")
    gammas = None if args.gamma_min is None else range(args.gamma_min, args.gamma_max + 1)
    try:
        result = tune_gamma_grid(
            synthetic_factory(), env, gammas, args.ne, args.repeats, RngStream(args.seed), args.budget
        )
    except TuningBudgetExceeded as exc:
        log.error("%s", exc)
        if exc.partial is not None:
            print(json.dumps(asdict(exc.partial), indent=2))
        return 3
    print(json.dumps(asdict(result), indent=2))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    handlers = {"run": _run, "suite": _suite, "tune": _tune}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"pfla: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
