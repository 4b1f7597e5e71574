"""Parameter-free learning automaton with beta posteriors and a benchmark harness."""

from .automaton import PflaState, RunOutcome, init, run, select_action, step
from .beta import BetaPosterior, log_beta, mass_within, sample, update
from .env import (
    BENCHMARKS,
    EnvironmentSpec,
    RngStream,
    benchmark,
    optimal_action,
    parse_environment,
    pull,
)
from .exact import ExactProbResult, prob_first_beats_second
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    emit_report,
    parse_report,
    relative_improvement,
    run_experiment,
    run_suite,
)
from .mc import HypothesisProbs, estimate_hypothesis_probs
from .tuning import SyntheticScheme, TuningBudgetExceeded, tune_gamma_grid, tune_resolution

__all__ = [
    "BENCHMARKS",
    "BetaPosterior",
    "EnvironmentSpec",
    "ExactProbResult",
    "ExperimentConfig",
    "ExperimentReport",
    "HypothesisProbs",
    "PflaState",
    "RngStream",
    "RunOutcome",
    "SyntheticScheme",
    "TuningBudgetExceeded",
    "benchmark",
    "emit_report",
    "estimate_hypothesis_probs",
    "init",
    "log_beta",
    "mass_within",
    "optimal_action",
    "parse_environment",
    "parse_report",
    "prob_first_beats_second",
    "pull",
    "relative_improvement",
    "run",
    "run_experiment",
    "run_suite",
    "sample",
    "select_action",
    "step",
    "tune_gamma_grid",
    "tune_resolution",
    "update",
]
