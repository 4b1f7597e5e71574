"""Replicated experiments, aggregate statistics and report files."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from . import _kernel
from .automaton import ENV_STREAM, ESTIMATORS, MC_STREAM, TIE_STREAM, run
from .env import BENCHMARKS, EnvironmentSpec, RngStream, benchmark, optimal_set

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "env",
    "eta",
    "n_mc",
    "replications",
    "seed",
    "accuracy",
    "mean_iterations",
    "stddev_iterations",
    "nonconverged",
    "wall_time_s",
)

@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvironmentSpec
    eta: float = 0.99
    mc_samples: int = 1000
    replications: int = 10_000
    seed: int = 0
    max_iter: int = 10**6
    estimator: str = "multinomial"

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if self.mc_samples < 1 or self.max_iter < 1:
            raise ValueError("mc_samples and max_iter must be >= 1")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.estimator!r}; expected one of {ESTIMATORS}")
        if self.estimator == "exact" and self.env.r != 2:
            raise ValueError("the exact estimator needs a two-action environment")


@dataclass(frozen=True)
class ExperimentReport:
    env: str
    eta: float
    n_mc: int
    replications: int
    seed: int
    accuracy: float
    mean_iterations: float
    stddev_iterations: float
    nonconverged: int
    wall_time_s: float


@dataclass(frozen=True)
class RunRecords:
    """Per-replication outcomes, indexed by replication number."""

    actions: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    terminal_max_prob: np.ndarray


def run_replications(config: ExperimentConfig, start: int, stop: int) -> RunRecords:
    """Execute replications ``start <= k < stop``; replication ``k`` uses stream ``k``."""
    n = stop - start
    actions = np.empty(n, dtype=np.int64)
    iterations = np.empty(n, dtype=np.int64)
    converged = np.empty(n, dtype=bool)
    top = np.empty(n, dtype=np.float64)
    probs = config.env.as_array()
    for offset, k in enumerate(range(start, stop)):
        stream = RngStream(config.seed, k)
        if config.estimator == "exact":
            out = run(config.env, config.eta, config.mc_samples, config.max_iter, stream, "exact")
            result = (out.converged_action, out.iterations, out.converged, out.terminal_max_prob)
        else:
            gens = [stream.substream(i).generator for i in (MC_STREAM, TIE_STREAM, ENV_STREAM)]
            if config.estimator == "draws":
                result = _kernel.run_draws(probs, config.eta, config.mc_samples, config.max_iter, *gens)
            else:
                result = _kernel.run_multinomial(
                    probs, config.eta, config.mc_samples, config.max_iter, *gens,
                    _kernel.GL_NODES, _kernel.GL_WEIGHTS, _kernel.GL_CUMULATIVE,
                )
        actions[offset], iterations[offset], converged[offset], top[offset] = result
    return RunRecords(actions, iterations, converged, top)


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, total, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def collect(config: ExperimentConfig, workers: int | None = None) -> RunRecords:
    """Run every replication, serially or across worker processes.

    Results are reassembled in replication order, so the outcome does not
    depend on ``workers``.
    """
    workers = workers or os.cpu_count() or 1
    workers = max(1, min(workers, config.replications))
    if workers == 1:
        return run_replications(config, 0, config.replications)
    pieces = _chunks(config.replications, workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run_replications, [config] * len(pieces), *zip(*pieces)))
    return RunRecords(*(np.concatenate([getattr(p, f.name) for p in parts]) for f in fields(RunRecords)))


def summarize(config: ExperimentConfig, records: RunRecords, wall_time: float = 0.0) -> ExperimentReport:
    """Aggregate per-run outcomes; iteration statistics use correct runs only."""
    best = np.array(sorted(optimal_set(config.env)))
    correct = records.converged & np.isin(records.actions, best)
    n_correct = int(correct.sum())
    its = [int(v) for v in records.iterations[correct]]
    total = sum(its)
    if n_correct == 0:
        mean = std = math.nan
    else:
        mean = total / n_correct
        if n_correct > 1:
            # exact integer sums keep the result independent of run order
            numer = n_correct * sum(v * v for v in its) - total * total
            std = math.sqrt(numer / (n_correct * (n_correct - 1)))
        else:
            std = 0.0
    return ExperimentReport(
        env=config.env.label,
        eta=config.eta,
        n_mc=config.mc_samples,
        replications=config.replications,
        seed=config.seed,
        accuracy=n_correct / config.replications,
        mean_iterations=mean,
        stddev_iterations=std,
        nonconverged=int((~records.converged).sum()),
        wall_time_s=wall_time,
    )


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    started = time.perf_counter()
    records = collect(config, workers)
    report = summarize(config, records, time.perf_counter() - started)
    log.info(
        "%s: accuracy=%.4f mean_iterations=%.1f nonconverged=%d (%.1fs)",
        report.env, report.accuracy, report.mean_iterations, report.nonconverged, report.wall_time_s,
    )
    return report


def run_suite(
    replications: int = 10_000,
    seed: int = 0,
    eta: float = 0.99,
    mc_samples: int = 1000,
    max_iter: int = 10**6,
    estimator: str = "multinomial",
    workers: int | None = None,
    env_ids: Sequence[str] = tuple(BENCHMARKS),
) -> list[ExperimentReport]:
    """All benchmark environments in E1..E9 order, each with the same seed."""
    return [
        run_experiment(
            ExperimentConfig(benchmark(e), eta, mc_samples, replications, seed, max_iter, estimator),
            workers,
        )
        for e in env_ids
    ]


def relative_improvement(iters_pfla: float, iters_other: float) -> float:
    """Signed speed-up of a compared scheme: ``(pfla - other) / pfla``."""
    if not iters_pfla > 0:
        raise ValueError(f"iters_pfla must be positive, got {iters_pfla}")
    return (iters_pfla - iters_other) / iters_pfla


def _write(reports: Sequence[ExperimentReport], fmt: str, stream: IO[str]) -> None:
    rows = [asdict(r) for r in reports]
    if fmt == "csv":
        writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    elif fmt == "json":
        json.dump(rows, stream, indent=2)
        stream.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def emit_report(
    reports: Sequence[ExperimentReport], fmt: str = "csv", destination: str | Path | IO[str] | None = None
) -> None:
    """Write reports as CSV (fixed ``CSV_COLUMNS`` header) or a JSON list.

    ``destination`` may be a path, an open text stream, or ``None`` for stdout.
    """
    if not reports:
        raise ValueError("no reports to emit")
    if destination is None:
        _write(reports, fmt, sys.stdout)
    elif isinstance(destination, (str, Path)):
        with open(destination, "w", newline="") as fh:
            _write(reports, fmt, fh)
    else:
        _write(reports, fmt, destination)


def format_report(reports: Sequence[ExperimentReport], fmt: str = "csv") -> str:
    buf = io.StringIO()
    emit_report(reports, fmt, buf)
    return buf.getvalue()


_COLUMN_TYPES = {f.name: f.type for f in fields(ExperimentReport)}


def _coerce(row: dict) -> ExperimentReport:
    casts = {"str": str, "float": float, "int": int}
    return ExperimentReport(**{k: casts[_COLUMN_TYPES[k]](row[k]) for k in CSV_COLUMNS})


def parse_report(text: str, fmt: str = "csv") -> list[ExperimentReport]:
    if fmt == "csv":
        return [_coerce(row) for row in csv.DictReader(io.StringIO(text))]
    if fmt == "json":
        return [_coerce(row) for row in json.loads(text)]
    raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def strip_wall_time(csv_text: str) -> str:
    """CSV text with the ``wall_time_s`` column removed, for determinism checks."""
    rows = list(csv.reader(io.StringIO(csv_text)))
    drop = rows[0].index("wall_time_s")
    return "\n".join(",".join(v for i, v in enumerate(row) if i != drop) for row in rows)
