import numpy as np
import pytest

from pfla.env import (
    BENCHMARKS,
    EnvironmentSpec,
    RngStream,
    benchmark,
    is_correct,
    optimal_action,
    parse_environment,
    pull,
)


def test_benchmark_vectors():
    assert benchmark("E1").reward_probs == (0.90, 0.60)
    assert benchmark("E5").reward_probs == (0.65, 0.50, 0.45, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10)
    assert benchmark("E9").reward_probs == (0.10, 0.45, 0.84, 0.76, 0.20, 0.40, 0.60, 0.70, 0.50, 0.30)
    assert [benchmark(e).r for e in BENCHMARKS] == [2, 2, 2, 2, 10, 10, 10, 10, 10]


def test_benchmark_is_stable():
    for e in BENCHMARKS:
        assert benchmark(e) == benchmark(e)


def test_unknown_benchmark_names_valid_ids():
    with pytest.raises(ValueError, match="E1.*E9"):
        benchmark("E10")


@pytest.mark.parametrize("probs", [(0.5,), (0.0, 0.5), (0.5, 1.0), (0.2, -0.1)])
def test_invalid_environment_rejected(probs):
    with pytest.raises(ValueError):
        EnvironmentSpec(probs)


def test_parse_environment():
    assert parse_environment("e4") == benchmark("E4")
    env = parse_environment("0.9, 0.6")
    assert env.reward_probs == (0.9, 0.6)
    with pytest.raises(ValueError):
        parse_environment("0.9,1")
    with pytest.raises(ValueError):
        parse_environment("fast")


def test_optimal_action():
    assert optimal_action(benchmark("E1")) == 0
    assert optimal_action(benchmark("E4")) == 1
    assert optimal_action(benchmark("E9")) == 2
    assert optimal_action(EnvironmentSpec((0.5, 0.5))) == frozenset({0, 1})
    tied = EnvironmentSpec((0.5, 0.5, 0.2))
    assert is_correct(tied, 1) and not is_correct(tied, 2)


def test_pull_out_of_range():
    with pytest.raises(IndexError):
        pull(benchmark("E1"), 2, RngStream(0))
    with pytest.raises(IndexError):
        pull(benchmark("E1"), -1, RngStream(0))


def test_pull_determinism():
    env = benchmark("E8")
    actions = np.random.default_rng(5).integers(0, env.r, 500)
    a, b = RngStream(11, 3), RngStream(11, 3)
    assert [pull(env, int(i), a) for i in actions] == [pull(env, int(i), b) for i in actions]


def test_pull_frequency():
    env = EnvironmentSpec((0.9, 0.1))
    rng = RngStream(1)
    n = 100_000
    mean = np.mean([pull(env, 0, rng) for _ in range(n)])
    assert abs(mean - 0.9) <= 3 * np.sqrt(0.9 * 0.1 / n)


def test_disjoint_streams_uncorrelated():
    env = EnvironmentSpec((0.5, 0.5))
    n = 20_000
    a, b = RngStream(7, 0), RngStream(7, 1)
    x = np.array([pull(env, 0, a) for _ in range(n)], dtype=float)
    y = np.array([pull(env, 0, b) for _ in range(n)], dtype=float)
    assert abs(np.corrcoef(x, y)[0, 1]) <= 3 / np.sqrt(n)


def test_substreams_are_persistent_and_distinct():
    s = RngStream(3, 2)
    assert s.substream(1) is s.substream(1)
    first = s.substream(0).generator.random(4)
    assert not np.array_equal(first, s.substream(1).generator.random(4))
    assert np.array_equal(first, RngStream(3, 2).substream(0).generator.random(4))


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        RngStream(-1)
