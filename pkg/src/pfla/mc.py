"""Monte Carlo estimate of the probability that each action is the best one."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernel
from .beta import BetaPosterior
from .env import RngStream

DEFAULT_SAMPLES = 1000


@dataclass(frozen=True)
class HypothesisProbs:
    """Estimated ``Pr(action i is optimal)`` for every action.

    Monte Carlo estimates keep the integer winner counts, which partition
    ``n_samples`` exactly; ``probs`` is ``counts / n_samples``. Exact
    two-action values carry no counts.
    """

    probs: np.ndarray
    counts: np.ndarray | None = None
    n_samples: int | None = None

    @classmethod
    def from_counts(cls, counts: np.ndarray, n_samples: int) -> HypothesisProbs:
        counts = np.asarray(counts, dtype=np.int64)
        if int(counts.sum()) != n_samples:
            raise AssertionError(f"winner counts sum to {int(counts.sum())}, expected {n_samples}")
        return cls(counts / n_samples, counts, n_samples)

    @property
    def max_prob(self) -> float:
        return float(self.probs.max())

    @property
    def best(self) -> int:
        return int(np.argmax(self.probs))

    def __len__(self) -> int:
        return len(self.probs)


def _as_arrays(posteriors: Sequence[BetaPosterior]) -> tuple[np.ndarray, np.ndarray]:
    if len(posteriors) == 0:
        raise ValueError("need at least one posterior")
    alpha = np.array([p.alpha for p in posteriors], dtype=np.float64)
    beta = np.array([p.beta for p in posteriors], dtype=np.float64)
    return alpha, beta


def estimate_hypothesis_probs(
    posteriors: Sequence[BetaPosterior],
    n_samples: int,
    rng: RngStream,
    method: str = "draws",
) -> HypothesisProbs:
    """Estimate the hypothesis probabilities from ``n_samples`` replications.

    ``method="draws"`` samples one value per posterior in each replication and
    credits the strict maximum (lowest index on exact float ties).
    ``method="multinomial"`` draws the same winner counts from their exact
    multinomial law, using quadrature for the cell probabilities.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    alpha, beta = _as_arrays(posteriors)
    if method == "draws":
        draws = rng.generator.beta(alpha, beta, size=(n_samples, len(alpha)))
        counts = np.bincount(draws.argmax(axis=1), minlength=len(alpha))
    elif method == "multinomial":
        counts = np.zeros(len(alpha), dtype=np.int64)
        p = _kernel.hypothesis_probs(alpha, beta, _kernel.GL_NODES, _kernel.GL_WEIGHTS, _kernel.GL_CUMULATIVE)
        _kernel.multinomial_counts(n_samples, p, rng.generator, counts)
    else:
        raise ValueError(f"unknown method {method!r}; expected 'draws' or 'multinomial'")
    return HypothesisProbs.from_counts(counts, n_samples)


def hypothesis_probabilities(posteriors: Sequence[BetaPosterior]) -> np.ndarray:
    """Quadrature value of ``Pr(e_i > e_j for all j != i)`` for each action."""
    alpha, beta = _as_arrays(posteriors)
    return _kernel.hypothesis_probs(alpha, beta, _kernel.GL_NODES, _kernel.GL_WEIGHTS, _kernel.GL_CUMULATIVE)
