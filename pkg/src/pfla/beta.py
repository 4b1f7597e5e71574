"""Beta posteriors over Bernoulli reward probabilities.

``log_beta`` follows the classic split used by R's ``lbeta``: the Stirling
remainder of log-gamma is evaluated separately so that ``ln B(a, b)`` keeps
full relative precision when one argument is huge and the other is small,
where ``lgamma(a) + lgamma(b) - lgamma(a + b)`` loses about ``log10(a)``
digits to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .env import RngStream

_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli-number coefficients B_2k / (2k (2k - 1)) of the Stirling series.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


def _stirling_remainder(x):
    """lgamma(x) - ((x - 1/2) ln x - x + ln sqrt(2 pi)), valid for x >= 10."""
    inv = 1.0 / x
    inv2 = inv * inv
    acc = _STIRLING[-1]
    for coef in reversed(_STIRLING[:-1]):
        acc = acc * inv2 + coef
    return acc * inv


def log_beta(a, b):
    """Natural log of the beta function ``B(a, b)`` for positive ``a`` and ``b``.

    Accepts scalars or broadcastable arrays; scalars give a Python float.
    """
    a_arr = np.asarray(a, dtype=np.float64)
    b_arr = np.asarray(b, dtype=np.float64)
    if np.any(~(a_arr > 0)) or np.any(~(b_arr > 0)):
        raise ValueError("log_beta requires strictly positive arguments")
    p, q = np.broadcast_arrays(np.minimum(a_arr, b_arr), np.maximum(a_arr, b_arr))
    out = np.empty(p.shape, dtype=np.float64)

    big = p >= 10.0
    if np.any(big):
        pb, qb = p[big], q[big]
        s = pb + qb
        corr = _stirling_remainder(pb) + _stirling_remainder(qb) - _stirling_remainder(s)
        out[big] = (
            -0.5 * np.log(qb) + _LN_SQRT_2PI + corr
            + (pb - 0.5) * np.log(pb / s) + qb * np.log1p(-pb / s)
        )
    mixed = (~big) & (q >= 10.0)
    if np.any(mixed):
        pm, qm = p[mixed], q[mixed]
        s = pm + qm
        corr = _stirling_remainder(qm) - _stirling_remainder(s)
        out[mixed] = special.gammaln(pm) + corr + pm - pm * np.log(s) + (qm - 0.5) * np.log1p(-pm / s)
    small = (~big) & (q < 10.0)
    if np.any(small):
        ps, qs = p[small], q[small]
        out[small] = np.log(special.gamma(ps) * (special.gamma(qs) / special.gamma(ps + qs)))

    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class BetaPosterior:
    """Integer-count posterior ``Beta(alpha, beta)`` for one action.

    Under the optimistic ``Beta(2, 1)`` start, ``alpha - 2`` counts rewards and
    ``beta - 1`` counts penalties.
    """

    alpha: int = 2
    beta: int = 1

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise TypeError(f"{name} must be an integer count, got {value!r}")
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def rewards(self) -> int:
        return self.alpha - 2

    @property
    def penalties(self) -> int:
        return self.beta - 1

    @property
    def selections(self) -> int:
        return self.alpha + self.beta - 3

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        n = self.alpha + self.beta
        return self.alpha * self.beta / (n * n * (n + 1))


def update(post: BetaPosterior, reward: bool) -> BetaPosterior:
    """Bayesian update after one Bernoulli observation."""
    if reward:
        return BetaPosterior(post.alpha + 1, post.beta)
    return BetaPosterior(post.alpha, post.beta + 1)


def sample(post: BetaPosterior, rng: RngStream, size=None):
    """Draw from ``Beta(alpha, beta)`` using the stream's generator."""
    return rng.generator.beta(float(post.alpha), float(post.beta), size=size)


def mass_within(post: BetaPosterior, center: float, eps: float) -> float:
    """Posterior probability of the window ``[center - eps, center + eps]``."""
    lo = max(center - eps, 0.0)
    hi = min(center + eps, 1.0)
    a, b = float(post.alpha), float(post.beta)
    return float(special.betainc(a, b, hi) - special.betainc(a, b, lo))
