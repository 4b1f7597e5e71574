import io
import json

import numpy as np
import pytest

from pfla.env import EnvironmentSpec, benchmark
from pfla.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    ExperimentReport,
    RunRecords,
    collect,
    emit_report,
    format_report,
    parse_report,
    relative_improvement,
    run_experiment,
    run_suite,
    strip_wall_time,
    summarize,
)


def _report(**kw):
    base = dict(
        env="E1", eta=0.99, n_mc=1000, replications=10, seed=3, accuracy=0.9, mean_iterations=44.125,
        stddev_iterations=12.3456789012345, nonconverged=1, wall_time_s=0.1234567,
    )
    base.update(kw)
    return ExperimentReport(**base)


def test_config_validation():
    env = benchmark("E1")
    for kw in ({"replications": 0}, {"eta": 0.0}, {"eta": 1.0}, {"mc_samples": 0}, {"estimator": "qmc"}):
        with pytest.raises(ValueError):
            ExperimentConfig(env, **kw)
    with pytest.raises(ValueError):
        ExperimentConfig(benchmark("E5"), estimator="exact")


def test_single_replication_extreme_gap():
    rep = run_experiment(ExperimentConfig(EnvironmentSpec((0.99, 0.01)), replications=1, seed=1), workers=1)
    assert rep.accuracy in (0.0, 1.0)
    assert rep.accuracy == 1.0
    assert rep.stddev_iterations == 0.0


def test_same_seed_same_report():
    cfg = ExperimentConfig(benchmark("E2"), replications=60, seed=5)
    a = format_report([run_experiment(cfg, workers=1)])
    b = format_report([run_experiment(cfg, workers=1)])
    assert strip_wall_time(a) == strip_wall_time(b)


@pytest.mark.parametrize("estimator", ["multinomial", "draws", "exact"])
def test_parallel_equals_serial(estimator):
    cfg = ExperimentConfig(benchmark("E4"), replications=40, seed=8, estimator=estimator)
    serial = collect(cfg, workers=1)
    parallel = collect(cfg, workers=3)
    for name in ("actions", "iterations", "converged", "terminal_max_prob"):
        assert np.array_equal(getattr(serial, name), getattr(parallel, name))


def test_summary_statistics():
    env = benchmark("E1")
    cfg = ExperimentConfig(env, replications=6)
    rec = RunRecords(
        actions=np.array([0, 0, 1, 0, 0, 0]),
        iterations=np.array([10, 20, 5, 30, 7, 1000]),
        converged=np.array([True, True, True, True, False, True]),
        terminal_max_prob=np.full(6, 0.995),
    )
    rep = summarize(cfg, rec)
    correct = np.array([10, 20, 30, 1000])
    assert rep.accuracy == pytest.approx(4 / 6)
    assert rep.nonconverged == 1
    assert rep.mean_iterations == pytest.approx(correct.mean())
    assert rep.stddev_iterations == pytest.approx(correct.std(ddof=1), rel=1e-14)


def test_summary_order_independent():
    env = benchmark("E1")
    cfg = ExperimentConfig(env, replications=500)
    rng = np.random.default_rng(0)
    its = rng.integers(1, 10**6, 500)
    rec = RunRecords(np.zeros(500, int), its, np.ones(500, bool), np.ones(500))
    perm = rng.permutation(500)
    shuffled = RunRecords(np.zeros(500, int), its[perm], np.ones(500, bool), np.ones(500))
    assert summarize(cfg, rec) == summarize(cfg, shuffled)


def test_no_correct_runs_gives_nan():
    cfg = ExperimentConfig(benchmark("E1"), replications=2)
    rec = RunRecords(np.array([1, 1]), np.array([3, 4]), np.array([True, True]), np.ones(2))
    rep = summarize(cfg, rec)
    assert rep.accuracy == 0.0 and np.isnan(rep.mean_iterations)


def test_relative_improvement():
    assert relative_improvement(44, 44) == 0
    assert relative_improvement(2737, 2032) == pytest.approx(0.2576, abs=5e-5)
    assert relative_improvement(100, 150) == pytest.approx(-0.5)
    for bad in (0, -3):
        with pytest.raises(ValueError):
            relative_improvement(bad, 10)


def test_csv_one_report_two_lines():
    text = format_report([_report()], "csv")
    lines = text.strip().split("\n")
    assert len(lines) == 2
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[0] == "env,eta,n_mc,replications,seed,accuracy,mean_iterations,stddev_iterations,nonconverged,wall_time_s"


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(fmt):
    reports = [_report(), _report(env="0.9,0.6", accuracy=1.0, mean_iterations=0.1 + 0.2, nonconverged=0)]
    assert parse_report(format_report(reports, fmt), fmt) == reports


def test_json_is_a_list_of_objects():
    data = json.loads(format_report([_report()], "json"))
    assert list(data[0]) == list(CSV_COLUMNS)


def test_emit_errors(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], "csv", io.StringIO())
    with pytest.raises(ValueError):
        emit_report([_report()], "xml", io.StringIO())
    with pytest.raises(OSError):
        emit_report([_report()], "csv", tmp_path / "missing" / "out.csv")
    out = tmp_path / "r.csv"
    emit_report([_report()], "csv", out)
    assert parse_report(out.read_text()) == [_report()]


def test_emit_stdout(capsys):
    emit_report([_report()])
    assert capsys.readouterr().out.startswith("env,eta")


def test_suite_rows_in_benchmark_order():
    reports = run_suite(replications=3, seed=1, workers=1)
    assert [r.env for r in reports] == [f"E{i}" for i in range(1, 10)]
    assert len(format_report(reports).strip().split("\n")) == 10
