"""Seeded example orderings and the many-runs resampling harness.

Each run visits the data in a fresh random order drawn from a named,
versioned generator (PCG64), so any (size, seed) pair reproduces the
same ordering on every platform.  Runs are independent; the harness can
execute them in worker processes, but summaries are always collected in
seed order so serial and parallel schedules emit identical output.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import LearnerConfig, as_feature_matrix
from .learner import run_sequence

_SEED_MODULUS = 2**64


def permutation(m: int, seed: int) -> np.ndarray:
    """Uniform random permutation of 0..m-1 for the given seed."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0 <= seed < _SEED_MODULUS:
        raise ValueError("seed must fit in 64 unsigned bits")
    generator = np.random.Generator(np.random.PCG64(seed))
    return generator.permutation(m)


@dataclass(frozen=True)
class SampleSummary:
    """Scalar outcome of one run: the values the density module models."""

    seed: int
    final_err1: float
    final_err2: float
    cluster_count: int
    total_reconstruction_error: float


def run_with_seed(data, config: LearnerConfig, seed: int) -> SampleSummary:
    """One full run over a seed-derived ordering, reduced to a summary."""
    data = as_feature_matrix(data)
    order = permutation(data.shape[0], seed)
    result = run_sequence(data, order, config)
    return SampleSummary(
        seed=seed,
        final_err1=result.err1_series[-1][1],
        final_err2=result.err2_series[-1][1],
        cluster_count=result.cluster_count,
        total_reconstruction_error=result.total_reconstruction_error,
    )


def _run_job(args) -> SampleSummary:
    data, config, seed = args
    return run_with_seed(data, config, seed)


def sample_runs(
    data,
    config: LearnerConfig,
    run_count: int,
    base_seed: int,
    workers: int | None = 1,
) -> list[SampleSummary]:
    """Run the learner over ``run_count`` seed-derived orderings.

    Seeds are base_seed, base_seed+1, ... (wrapping at 2^64).  The
    returned list is ordered by seed index regardless of how many worker
    processes executed the runs; workers=None or 0 means one per CPU.
    Failures are re-raised with the offending seed attached.
    """
    if run_count < 1:
        raise ValueError("run_count must be at least 1")
    data = as_feature_matrix(data)
    seeds = [(base_seed + r) % _SEED_MODULUS for r in range(run_count)]
    if workers in (None, 0):
        workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError("workers must be positive (or 0 for auto)")

    if workers == 1 or run_count == 1:
        return [_wrap_run(data, config, seed) for seed in seeds]

    summaries: list[SampleSummary] = []
    with ProcessPoolExecutor(max_workers=min(workers, run_count)) as pool:
        futures = [pool.submit(_run_job, (data, config, seed)) for seed in seeds]
        for seed, future in zip(seeds, futures):
            try:
                summaries.append(future.result())
            except Exception as exc:
                raise RuntimeError(f"run with seed {seed} failed: {exc}") from exc
    return summaries


def _wrap_run(data, config: LearnerConfig, seed: int) -> SampleSummary:
    try:
        return run_with_seed(data, config, seed)
    except Exception as exc:
        raise RuntimeError(f"run with seed {seed} failed: {exc}") from exc
