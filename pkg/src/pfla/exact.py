"""Closed-form ``Pr(e1 > e2)`` for two independent integer-parameter betas.

Four equivalent finite sums are available; they run over ``alpha1``,
``beta2``, ``alpha2`` and ``beta1`` terms respectively, so the cheapest one
costs ``min(alpha1, beta1, alpha2, beta2)`` terms. Every term is formed in log
space and the sum is taken after shifting by the largest log-term.

The module also carries the one-step recurrences of ``g = Pr(e1 > e2)`` and
the expected-increment quantities behind the least-sampled exploration rule;
the engine does not call those, they exist so the rule can be checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beta import BetaPosterior, log_beta

FORMS = ("alpha1", "beta2", "alpha2", "beta1")


@dataclass(frozen=True)
class ExactProbResult:
    value: float
    terms_summed: int
    form: str


def _params(p1: BetaPosterior, p2: BetaPosterior) -> tuple[int, int, int, int]:
    a1, b1, a2, b2 = p1.alpha, p1.beta, p2.alpha, p2.beta
    if min(a1, b1, a2, b2) < 1:
        raise ValueError("beta parameters must be positive integers")
    return a1, b1, a2, b2


def _sum_exp(log_terms: np.ndarray) -> float:
    top = float(log_terms.max())
    return math.exp(top) * float(np.exp(log_terms - top).sum())


def _series(n_terms: int, a_shift: int, b_fixed: int, b_other: int) -> float:
    """sum_{i<n} B(a_shift+i, b_fixed+b_other) / ((b_fixed+i) B(1+i, b_fixed) B(a_shift, b_other)).

    The four closed forms are all instances of this sum with the roles of the
    parameters permuted.
    """
    i = np.arange(n_terms, dtype=np.float64)
    log_terms = (
        log_beta(a_shift + i, b_fixed + b_other)
        - np.log(b_fixed + i)
        - log_beta(1.0 + i, b_fixed)
        - log_beta(a_shift, b_other)
    )
    return _sum_exp(np.atleast_1d(log_terms))


def prob_by_form(p1: BetaPosterior, p2: BetaPosterior, form: str) -> float:
    """Evaluate ``Pr(e1 > e2)`` with one specific closed form."""
    a1, b1, a2, b2 = _params(p1, p2)
    if form == "alpha1":
        value = _series(a1, a2, b1, b2)
    elif form == "beta2":
        value = _series(b2, b1, a2, a1)
    elif form == "alpha2":
        value = 1.0 - _series(a2, a1, b2, b1)
    elif form == "beta1":
        value = 1.0 - _series(b1, b2, a1, a2)
    else:
        raise ValueError(f"unknown form {form!r}; expected one of {FORMS}")
    return min(max(value, 0.0), 1.0)


def prob_first_beats_second(p1: BetaPosterior, p2: BetaPosterior) -> ExactProbResult:
    """``Pr(e1 > e2)`` with ``e1 ~ p1`` and ``e2 ~ p2``, using the shortest sum.

    Ties in term count go to the first form in ``FORMS`` order.
    """
    a1, b1, a2, b2 = _params(p1, p2)
    counts = dict(zip(FORMS, (a1, b2, a2, b1)))
    form = min(FORMS, key=lambda f: counts[f])
    return ExactProbResult(prob_by_form(p1, p2, form), counts[form], form)


def all_forms(p1: BetaPosterior, p2: BetaPosterior) -> dict[str, float]:
    return {form: prob_by_form(p1, p2, form) for form in FORMS}


def h_factor(p1: BetaPosterior, p2: BetaPosterior) -> float:
    """``B(a1 + a2, b1 + b2) / (B(a1, b1) B(a2, b2))``, evaluated in log space."""
    a1, b1, a2, b2 = _params(p1, p2)
    return math.exp(log_beta(a1 + a2, b1 + b2) - log_beta(a1, b1) - log_beta(a2, b2))


def _g(a1: int, b1: int, a2: int, b2: int) -> float:
    return prob_first_beats_second(BetaPosterior(a1, b1), BetaPosterior(a2, b2)).value


def recurrence_check(
    p1: BetaPosterior, p2: BetaPosterior, atol: float = 1e-9
) -> tuple[bool, bool, bool, bool]:
    """Check the four one-step recurrences of ``g`` against direct evaluation.

    Returns flags for incrementing ``alpha1``, ``beta1``, ``alpha2``, ``beta2``
    in that order.
    """
    a1, b1, a2, b2 = _params(p1, p2)
    g = _g(a1, b1, a2, b2)
    h = h_factor(p1, p2)
    predicted = (g + h / a1, g - h / b1, g - h / a2, g + h / b2)
    direct = (_g(a1 + 1, b1, a2, b2), _g(a1, b1 + 1, a2, b2), _g(a1, b1, a2 + 1, b2), _g(a1, b1, a2, b2 + 1))
    return tuple(abs(p - d) <= atol for p, d in zip(predicted, direct))  # type: ignore[return-value]


def expected_increment(p1: BetaPosterior, p2: BetaPosterior, chosen: int, reward_prob: float) -> float:
    """Expected change of ``Pr(e1 > e2)`` when action ``chosen`` (0 or 1) is pulled once."""
    h = h_factor(p1, p2)
    if chosen == 0:
        return h * (reward_prob / p1.alpha - (1.0 - reward_prob) / p1.beta)
    if chosen == 1:
        return h * (-reward_prob / p2.alpha + (1.0 - reward_prob) / p2.beta)
    raise ValueError("chosen must be 0 or 1")


def best_case_increment(p1: BetaPosterior, p2: BetaPosterior, chosen: int, reward_prob: float | None = None) -> float:
    """Expected size of the favourable jump in ``Pr(e1 > e2)`` for one pull.

    Only a reward on action 0 or a penalty on action 1 raises ``Pr(e1 > e2)``.
    Without ``reward_prob`` the posterior mean stands in for it, which reduces
    the value to ``h / (alpha + beta)`` of the pulled action.
    """
    h = h_factor(p1, p2)
    if chosen == 0:
        c = p1.mean if reward_prob is None else reward_prob
        return c * h / p1.alpha
    if chosen == 1:
        c = p2.mean if reward_prob is None else reward_prob
        return (1.0 - c) * h / p2.beta
    raise ValueError("chosen must be 0 or 1")
