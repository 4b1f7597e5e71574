"""Stationary P-model environments and seeded random streams.

An environment is just a vector of reward probabilities; pulling action ``i``
returns a reward with probability ``c[i]`` and a penalty otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BENCHMARKS: dict[str, tuple[float, ...]] = {
    "E1": (0.90, 0.60),
    "E2": (0.80, 0.50),
    "E3": (0.80, 0.60),
    "E4": (0.20, 0.50),
    "E5": (0.65, 0.50, 0.45, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10),
    "E6": (0.60, 0.50, 0.45, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10),
    "E7": (0.55, 0.50, 0.45, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10),
    "E8": (0.70, 0.50, 0.30, 0.20, 0.40, 0.50, 0.40, 0.30, 0.50, 0.20),
    "E9": (0.10, 0.45, 0.84, 0.76, 0.20, 0.40, 0.60, 0.70, 0.50, 0.30),
}


@dataclass(frozen=True)
class EnvironmentSpec:
    """Reward probabilities of a stationary Bernoulli environment."""

    reward_probs: tuple[float, ...]
    label: str = "custom"

    def __post_init__(self) -> None:
        probs = tuple(float(c) for c in self.reward_probs)
        if len(probs) < 2:
            raise ValueError(f"need at least 2 actions, got {len(probs)}")
        for i, c in enumerate(probs):
            if not 0.0 < c < 1.0:
                raise ValueError(f"reward probability c[{i}]={c} must lie in the open interval (0, 1)")
        object.__setattr__(self, "reward_probs", probs)

    @property
    def r(self) -> int:
        return len(self.reward_probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.reward_probs, dtype=np.float64)


class RngStream:
    """Seeded random stream keyed by ``(seed, stream_id)``.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys, so
    distinct stream ids (and distinct sub-streams) are statistically
    independent and every stream is reproducible bit-for-bit. The stream owns
    a PCG64 generator whose state advances as it is used; do not share one
    between concurrent runs.
    """

    def __init__(self, seed: int, stream_id: int = 0, *, _path: tuple[int, ...] = ()) -> None:
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative integers")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._path = _path
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *_path))
        self.generator = np.random.Generator(np.random.PCG64(sequence))
        self._children: dict[int, RngStream] = {}

    def substream(self, index: int) -> RngStream:
        """Return the persistent child stream ``index`` (created on first use)."""
        child = self._children.get(index)
        if child is None:
            child = RngStream(self.seed, self.stream_id, _path=(*self._path, int(index)))
            self._children[index] = child
        return child

    def __repr__(self) -> str:
        path = "".join(f"/{p}" for p in self._path)
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}{path})"


def benchmark(env_id: str) -> EnvironmentSpec:
    """Return one of the nine benchmark environments ``E1`` .. ``E9``."""
    try:
        probs = BENCHMARKS[env_id]
    except KeyError:
        valid = ", ".join(BENCHMARKS)
        raise ValueError(f"unknown environment {env_id!r}; valid identifiers: {valid}") from None
    return EnvironmentSpec(probs, label=env_id)


def parse_environment(text: str) -> EnvironmentSpec:
    """Parse a benchmark id or a comma-separated probability list such as ``0.9,0.6``."""
    text = text.strip()
    if text.upper() in BENCHMARKS:
        return benchmark(text.upper())
    try:
        probs = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValueError(
            f"cannot parse environment {text!r}: expected E1..E9 or a list like 0.9,0.6"
        ) from None
    return EnvironmentSpec(probs, label=text.replace(" ", ""))


def pull(env: EnvironmentSpec, action: int, rng: RngStream) -> bool:
    """Interact once with ``env``; ``True`` is a reward, ``False`` a penalty."""
    if not 0 <= action < env.r:
        raise IndexError(f"action {action} out of range for {env.r}-action environment")
    return bool(rng.generator.random() < env.reward_probs[action])


def optimal_action(env: EnvironmentSpec) -> int | frozenset[int]:
    """Index of the best action, or the set of indices when the maximum is shared."""
    best = max(env.reward_probs)
    winners = [i for i, c in enumerate(env.reward_probs) if c == best]
    if len(winners) == 1:
        return winners[0]
    return frozenset(winners)


def optimal_set(env: EnvironmentSpec) -> frozenset[int]:
    best = optimal_action(env)
    return best if isinstance(best, frozenset) else frozenset((best,))


def is_correct(env: EnvironmentSpec, action: int) -> bool:
    return action in optimal_set(env)
