"""Resolution / perturbation search for schemes that need tuned parameters.

A tunable scheme is built from a resolution ``n`` (and optionally a
perturbation ``gamma``) and then run on an environment. The search starts at
``n = 1`` and bumps ``n`` after every wrong convergence; it stops once ``ne``
consecutive runs at the current ``n`` are all correct. Every pull made along
the way is charged to the tuning cost.

Only a synthetic scheme ships here. It exists to exercise the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .automaton import RunOutcome
from .env import EnvironmentSpec, RngStream, is_correct, optimal_set

DEFAULT_NE = 750
DEFAULT_REPEATS = 20
DEFAULT_BUDGET = 10**10
SPEED_REPLICATIONS = 1000


class TunableScheme(Protocol):
    def run(self, env: EnvironmentSpec, rng: np.random.Generator) -> RunOutcome: ...


SchemeFactory = Callable[[int, "int | None"], TunableScheme]


@dataclass(frozen=True)
class SyntheticScheme:
    """Deterministic stand-in: correct iff ``n >= threshold``.

    A run costs ``base_iterations + n + slope * |gamma - best_gamma|`` pulls,
    so for any ``n`` the fastest perturbation is ``best_gamma``.
    """

    n: int
    gamma: int | None = None
    threshold: int = 7
    best_gamma: int = 3
    base_iterations: int = 40
    slope: int = 5

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"resolution n must be >= 1, got {self.n}")

    @property
    def iterations(self) -> int:
        spread = 0 if self.gamma is None else abs(self.gamma - self.best_gamma)
        return self.base_iterations + self.n + self.slope * spread

    def run(self, env: EnvironmentSpec, rng: np.random.Generator) -> RunOutcome:
        best = min(optimal_set(env))
        if self.n >= self.threshold:
            action = best
        else:
            action = next(i for i in range(env.r) if not is_correct(env, i))
        return RunOutcome(action, self.iterations, True, 1.0)


def synthetic_factory(threshold: int = 7, best_gamma: int = 3, base_iterations: int = 40, slope: int = 5) -> SchemeFactory:
    def make(n: int, gamma: int | None = None) -> SyntheticScheme:
        return SyntheticScheme(n, gamma, threshold, best_gamma, base_iterations, slope)

    return make


@dataclass(frozen=True)
class ResolutionResult:
    mean_n: float
    best_ns: tuple[int, ...]
    interactions: int
    gamma: int | None = None


@dataclass(frozen=True)
class GridPoint:
    gamma: int
    n: int
    mean_n: float
    mean_iterations: float


@dataclass(frozen=True)
class GridResult:
    n: int
    gamma: int
    mean_iterations: float
    interactions: int
    points: tuple[GridPoint, ...] = field(default=())


class TuningBudgetExceeded(RuntimeError):
    """Raised when tuning would exceed its interaction budget.

    ``partial`` holds whatever was finished: the best ``n`` of completed
    repeats and the interactions spent so far.
    """

    def __init__(self, message: str, partial: ResolutionResult | GridResult | None) -> None:
        super().__init__(message)
        self.partial = partial


class _Meter:
    def __init__(self, budget: int) -> None:
        self.budget = budget
        self.used = 0

    def charge(self, pulls: int) -> bool:
        self.used += pulls
        return self.used <= self.budget


def _search(
    factory: SchemeFactory,
    env: EnvironmentSpec,
    ne: int,
    repeats: int,
    gen: np.random.Generator,
    gamma: int | None,
    meter: _Meter,
) -> ResolutionResult:
    best_ns: list[int] = []
    start = meter.used
    for _ in range(repeats):
        n, streak = 1, 0
        scheme = factory(n, gamma)
        while streak < ne:
            outcome = scheme.run(env, gen)
            within = meter.charge(outcome.iterations)
            if outcome.converged and is_correct(env, outcome.converged_action):
                streak += 1
            else:
                n, streak = n + 1, 0
                scheme = factory(n, gamma)
            if not within:
                partial = ResolutionResult(
                    float(np.mean(best_ns)) if best_ns else math.nan,
                    tuple(best_ns),
                    meter.used - start,
                    gamma,
                )
                raise TuningBudgetExceeded(
                    f"tuning used {meter.used} interactions, over the budget of {meter.budget}", partial
                )
        best_ns.append(n)
    return ResolutionResult(float(np.mean(best_ns)), tuple(best_ns), meter.used - start, gamma)


def _check(ne: int, repeats: int) -> None:
    if ne < 1 or repeats < 1:
        raise ValueError("ne and repeats must be >= 1")


def tune_resolution(
    factory: SchemeFactory,
    env: EnvironmentSpec,
    ne: int = DEFAULT_NE,
    repeats: int = DEFAULT_REPEATS,
    rng: RngStream | None = None,
    gamma: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> ResolutionResult:
    """Average smallest resolution that survives ``ne`` consecutive correct runs."""
    _check(ne, repeats)
    rng = rng if rng is not None else RngStream(0)
    return _search(factory, env, ne, repeats, rng.generator, gamma, _Meter(budget))


def tune_gamma_grid(
    factory: SchemeFactory,
    env: EnvironmentSpec,
    gamma_range: Sequence[int] | None = None,
    ne: int = DEFAULT_NE,
    repeats: int = DEFAULT_REPEATS,
    rng: RngStream | None = None,
    budget: int = DEFAULT_BUDGET,
    speed_reps: int = SPEED_REPLICATIONS,
) -> GridResult:
    """Tune ``n`` for every ``gamma`` and return the fastest ``(n, gamma)`` pair.

    Each ``gamma`` gets its averaged ``n`` rounded up to an integer, then that
    pair is timed as the mean iterations over ``speed_reps`` fresh runs. Equal
    speeds go to the smaller ``gamma``. The reported cost counts every pull,
    timing runs included.
    """
    _check(ne, repeats)
    gammas = list(default_gamma_range(env) if gamma_range is None else gamma_range)
    if not gammas:
        raise ValueError("gamma_range must not be empty")
    rng = rng if rng is not None else RngStream(0)
    gen = rng.generator
    meter = _Meter(budget)
    points: list[GridPoint] = []

    def best_so_far() -> GridResult | None:
        if not points:
            return None
        top = min(points, key=lambda p: (p.mean_iterations, p.gamma))
        return GridResult(top.n, top.gamma, top.mean_iterations, meter.used, tuple(points))

    for gamma in sorted(gammas):
        try:
            found = _search(factory, env, ne, repeats, gen, gamma, meter)
        except TuningBudgetExceeded as exc:
            raise TuningBudgetExceeded(str(exc), best_so_far()) from None
        n = math.ceil(found.mean_n)
        scheme = factory(n, gamma)
        total = 0
        for _ in range(speed_reps):
            its = scheme.run(env, gen).iterations
            total += its
            if not meter.charge(its):
                raise TuningBudgetExceeded(
                    f"tuning used {meter.used} interactions, over the budget of {meter.budget}", best_so_far()
                )
        points.append(GridPoint(gamma, n, found.mean_n, total / speed_reps))
    result = best_so_far()
    assert result is not None
    return result


def default_gamma_range(env: EnvironmentSpec) -> range:
    """Perturbation grid sized by the environment: wider for more actions."""
    if env.label == "E7":
        return range(1, 31)
    if env.r == 2:
        return range(1, 11)
    return range(1, 21)
