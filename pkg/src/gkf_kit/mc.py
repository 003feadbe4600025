"""Reproducible Monte Carlo partitioning.

The sample index space is cut into fixed-size chunks and chunk ``c`` draws
from its own Philox stream keyed by ``(seed, c)``.  The chunk layout depends
only on ``(seed, n_samples, chunk_size)``, so results do not change with the
number of workers used to process the chunks.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator

import numpy as np

from .errors import InvalidArgument


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for chunk ``index`` of the stream ``seed``."""
    return np.random.Generator(np.random.Philox(key=[int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)]))


def chunk_sizes(n_samples: int, chunk_size: int) -> list[int]:
    if n_samples < 1:
        raise InvalidArgument("n_samples must be positive")
    if chunk_size < 1:
        raise InvalidArgument("chunk_size must be positive")
    full, rest = divmod(int(n_samples), int(chunk_size))
    return [chunk_size] * full + ([rest] if rest else [])


def chunk_generators(seed: int, n_samples: int, chunk_size: int) -> Iterator[tuple[np.random.Generator, int]]:
    """Yield ``(rng, size)`` for each chunk in index order."""
    for index, size in enumerate(chunk_sizes(n_samples, chunk_size)):
        yield chunk_rng(seed, index), size


def resolve_threads(threads) -> int:
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise InvalidArgument("threads must be >= 1 or 'auto'")
    return threads


def map_chunks(func: Callable[[np.random.Generator, int], object], seed: int, n_samples: int,
               chunk_size: int, threads=1) -> list:
    """Apply ``func(rng, size)`` to every chunk; results are returned in chunk order.

    numpy releases the GIL inside its vectorized kernels, so a thread pool
    gives real speedups for the large array operations used here.
    """
    jobs = list(enumerate(chunk_sizes(n_samples, chunk_size)))
    workers = min(resolve_threads(threads), len(jobs))
    if workers <= 1:
        return [func(chunk_rng(seed, i), size) for i, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: func(chunk_rng(seed, job[0]), job[1]), jobs))
