import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfla.beta import BetaPosterior, log_beta, mass_within, sample, update
from pfla.env import RngStream

mpmath.mp.dps = 40


def _oracle(a, b):
    return float(mpmath.log(mpmath.beta(a, b)))


def test_log_beta_examples():
    assert log_beta(1, 1) == 0.0
    assert log_beta(2, 2) == pytest.approx(math.log(1 / 6), rel=1e-15)


@pytest.mark.parametrize("bad", [(0, 1), (1, 0), (-2.5, 3)])
def test_log_beta_domain(bad):
    with pytest.raises(ValueError):
        log_beta(*bad)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_log_beta_matches_mpmath(a, b):
    ref = _oracle(a, b)
    got = log_beta(a, b)
    assert abs(got - ref) <= 1e-12 * max(abs(ref), 1e-300) or (ref == 0.0 and got == 0.0)


def test_log_beta_grid_against_mpmath():
    vals = [1, 2, 3, 7, 10, 11, 50, 99, 1000, 12345, 999_999, 10**6]
    for a in vals:
        for b in vals:
            ref = _oracle(a, b)
            got = log_beta(a, b)
            if ref == 0.0:
                assert got == 0.0
            else:
                assert abs(got - ref) / abs(ref) <= 1e-12, (a, b)


@given(st.floats(1e-3, 1e5), st.floats(1e-3, 1e5))
def test_log_beta_symmetric(a, b):
    assert log_beta(a, b) == pytest.approx(log_beta(b, a), rel=1e-13, abs=1e-13)


def test_log_beta_vectorized():
    a = np.array([1.0, 2.0, 40.0])
    b = np.array([1.0, 2.0, 3.0])
    out = log_beta(a, b)
    assert out.shape == (3,)
    assert out[2] == pytest.approx(_oracle(40, 3), rel=1e-13)


def test_posterior_counters():
    p = BetaPosterior()
    assert (p.alpha, p.beta) == (2, 1)
    assert (p.rewards, p.penalties, p.selections) == (0, 0, 0)
    assert p.mean == pytest.approx(2 / 3)
    p = BetaPosterior(7, 4)
    assert (p.rewards, p.penalties, p.selections) == (5, 3, 8)


@pytest.mark.parametrize("bad", [(0, 1), (1, 0)])
def test_posterior_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        BetaPosterior(*bad)


def test_posterior_rejects_non_integer():
    with pytest.raises(TypeError):
        BetaPosterior(2.5, 1)


def test_update():
    assert update(BetaPosterior(2, 1), True) == BetaPosterior(3, 1)
    assert update(BetaPosterior(2, 1), False) == BetaPosterior(2, 2)


@given(st.lists(st.booleans(), max_size=60))
def test_update_counts_one_per_step(feedback):
    p = BetaPosterior()
    for k, fb in enumerate(feedback, 1):
        q = update(p, fb)
        assert (q.alpha - p.alpha) + (q.beta - p.beta) == 1
        assert q.selections == k
        p = q


@pytest.mark.parametrize("post, mean", [(BetaPosterior(1, 1), 0.5), (BetaPosterior(2, 1), 2 / 3)])
def test_sample_mean(post, mean):
    n = 100_000
    x = sample(post, RngStream(4), size=n)
    assert abs(x.mean() - mean) <= 3 * math.sqrt(post.variance / n)
    assert np.all((x > 0) & (x < 1))


def test_sample_variance():
    post = BetaPosterior(50, 50)
    x = sample(post, RngStream(8), size=1_000_000)
    assert abs(x.var() - post.variance) <= 0.05 * post.variance


def test_sample_deterministic():
    post = BetaPosterior(5, 9)
    assert sample(post, RngStream(2, 1)) == sample(post, RngStream(2, 1))


def test_mass_concentrates_and_grows_with_samples():
    for c in (0.3, 0.6, 0.9):
        masses = []
        for s in (10, 100, 1000, 10_000):
            masses.append(mass_within(BetaPosterior(round(c * s) + 1, round((1 - c) * s) + 1), c, 0.05))
        assert all(m2 >= m1 for m1, m2 in zip(masses, masses[1:]))
        assert masses[-1] > 0.999
