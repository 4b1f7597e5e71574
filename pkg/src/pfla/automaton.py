"""Reference implementation of the parameter-free learning automaton.

Every action starts from the optimistic posterior ``Beta(2, 1)``. Each step
estimates how likely each action is to be optimal, takes the two most likely
candidates, pulls whichever of them has been tried less often, and updates
that action's posterior. The run stops as soon as one estimate exceeds the
threshold ``eta``.

This module favours readability; :mod:`pfla._kernel` holds a compiled
equivalent that consumes the random streams identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import env as env_mod
from .beta import BetaPosterior, update
from .env import EnvironmentSpec, RngStream
from .exact import prob_first_beats_second
from .mc import DEFAULT_SAMPLES, HypothesisProbs, estimate_hypothesis_probs

# Sub-stream indices of a run's RngStream.
MC_STREAM, TIE_STREAM, ENV_STREAM = 0, 1, 2

ESTIMATORS = ("draws", "multinomial", "exact")


@dataclass
class PflaState:
    posteriors: list[BetaPosterior]
    t: int = 0
    last_probs: HypothesisProbs | None = None

    @property
    def selections(self) -> list[int]:
        return [p.selections for p in self.posteriors]


@dataclass(frozen=True)
class RunOutcome:
    converged_action: int
    iterations: int
    converged: bool
    terminal_max_prob: float


def init(r: int) -> PflaState:
    if r < 2:
        raise ValueError(f"need at least 2 actions, got {r}")
    return PflaState([BetaPosterior(2, 1) for _ in range(r)])


def estimate(
    posteriors: Sequence[BetaPosterior], n_samples: int, rng: RngStream, estimator: str = "draws"
) -> HypothesisProbs:
    if estimator == "exact":
        if len(posteriors) != 2:
            raise ValueError("the exact estimator only handles two actions")
        g = prob_first_beats_second(posteriors[0], posteriors[1]).value
        return HypothesisProbs(np.array([g, 1.0 - g]))
    return estimate_hypothesis_probs(posteriors, n_samples, rng.substream(MC_STREAM), method=estimator)


def select_action(probs: HypothesisProbs | Sequence[float], posteriors: Sequence[BetaPosterior], rng: RngStream) -> int:
    """Pick the less-sampled of the two most probably optimal actions.

    Equal probabilities are ranked by one uniform key per action, so a pair is
    drawn at random from tied leaders; equal selection counts within the pair
    are settled by one more uniform.
    """
    p = np.asarray(probs.probs if isinstance(probs, HypothesisProbs) else probs, dtype=np.float64)
    if len(p) != len(posteriors) or len(p) < 2:
        raise ValueError("probs and posteriors must have the same length >= 2")
    gen = rng.generator
    keys = gen.random(len(p))
    first, second = np.lexsort((keys, -p))[:2]
    s_first = posteriors[first].selections
    s_second = posteriors[second].selections
    if s_first != s_second:
        return int(first if s_first < s_second else second)
    return int(first if gen.random() < 0.5 else second)


def _advance(state: PflaState, probs: HypothesisProbs, pull: Callable[[int], bool], rng: RngStream) -> PflaState:
    action = select_action(probs, state.posteriors, rng.substream(TIE_STREAM))
    reward = pull(action)
    posteriors = list(state.posteriors)
    posteriors[action] = update(posteriors[action], reward)
    return PflaState(posteriors, state.t + 1, probs)


def step(
    state: PflaState,
    pull: Callable[[int], bool],
    n_samples: int,
    rng: RngStream,
    estimator: str = "draws",
) -> PflaState:
    """One full interaction: estimate, select, pull once, update."""
    probs = estimate(state.posteriors, n_samples, rng, estimator)
    return _advance(state, probs, pull, rng)


def run(
    env: EnvironmentSpec,
    eta: float = 0.99,
    n_samples: int = DEFAULT_SAMPLES,
    max_iter: int = 10**6,
    rng: RngStream | None = None,
    estimator: str = "draws",
) -> RunOutcome:
    """Run until some hypothesis estimate exceeds ``eta`` or ``max_iter`` pulls.

    The threshold is tested right after every estimate, before the pull, so a
    run that is already decided never spends an extra interaction.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if n_samples < 1 or max_iter < 1:
        raise ValueError("n_samples and max_iter must be >= 1")
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; expected one of {ESTIMATORS}")
    rng = rng if rng is not None else RngStream(0)
    env_rng = rng.substream(ENV_STREAM)

    def pull(action: int) -> bool:
        return env_mod.pull(env, action, env_rng)

    state = init(env.r)
    while True:
        probs = estimate(state.posteriors, n_samples, rng, estimator)
        state.last_probs = probs
        if probs.max_prob > eta:
            return RunOutcome(probs.best, state.t, True, probs.max_prob)
        if state.t >= max_iter:
            return RunOutcome(probs.best, state.t, False, probs.max_prob)
        state = _advance(state, probs, pull, rng)
