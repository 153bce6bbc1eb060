"""Reproducible random streams for Monte Carlo work.

Samples are organised in fixed-size blocks.  Block ``b`` of a run with seed
``s`` draws from a generator keyed by ``SeedSequence(s, spawn_key=(b,))``, so
the numbers used by path ``p`` depend only on ``(s, p)`` and never on how
blocks are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgumentError

BLOCK_SIZE = 8192


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or seed < 0:
        raise InvalidArgumentError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed), spawn_key=(int(block),)))


def block_ranges(n: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    return [(start, min(start + block_size, n)) for start in range(0, n, block_size)]


def run_blocks(fn: Callable[[int, int, int], np.ndarray], n: int, workers: int = 1) -> np.ndarray:
    """Evaluate ``fn(block, start, stop)`` for every block and concatenate in block order."""
    ranges = block_ranges(n)
    jobs = [(b, start, stop) for b, (start, stop) in enumerate(ranges)]
    if workers <= 1 or len(jobs) == 1:
        parts = [fn(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: fn(*job), jobs))
    return np.concatenate(parts) if parts else np.empty(0)


def mean_and_stderr(samples: Sequence[float]) -> tuple[float, float]:
    """Sample mean and standard error with exactly rounded sums.

    ``math.fsum`` makes the result independent of summation order.  A single
    sample has no spread estimate, so its standard error is ``nan``.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n == 0:
        raise InvalidArgumentError("no samples")
    if x.min() == x.max():
        return float(x[0]), (0.0 if n > 1 else math.nan)
    mean = math.fsum(x) / n
    if n == 1:
        return mean, math.nan
    var = math.fsum((x - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)
