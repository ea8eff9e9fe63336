"""Deterministic chunked Monte Carlo.

Work is cut into fixed-size chunks whose seeds are spawned from one
``SeedSequence``. The partition depends only on the total size and the chunk
size, never on the worker count, and results come back in chunk order, so
any number of workers reproduces the single-worker numbers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence

import numpy as np

__all__ = ["DEFAULT_CHUNK", "chunk_sizes", "run_chunks", "fsum_columns"]

DEFAULT_CHUNK = 25_000


def chunk_sizes(n_total: int, chunk: int = DEFAULT_CHUNK) -> List[int]:
    if n_total < 0:
        raise ValueError("n_total must be non-negative")
    full, rest = divmod(n_total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def run_chunks(fn: Callable[[int, np.random.Generator], object], n_total: int,
               rng: np.random.Generator, workers: int = 1, chunk: int = DEFAULT_CHUNK) -> list:
    """Apply ``fn(n_chunk, chunk_rng)`` to every chunk and return results in order.

    One integer is drawn from ``rng`` to seed the chunk streams, so the caller's
    generator advances by the same amount whatever ``n_total`` is.
    """
    sizes = chunk_sizes(n_total, chunk)
    entropy = int(rng.integers(0, 2**63))
    seqs = np.random.SeedSequence(entropy).spawn(len(sizes))
    jobs = [(n, np.random.default_rng(s)) for n, s in zip(sizes, seqs)]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(n, g) for n, g in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, n, g) for n, g in jobs]
        # result() re-raises the first hard error; later chunks are discarded
        try:
            return [f.result() for f in futures]
        except BaseException:
            for f in futures:
                f.cancel()
            raise


def fsum_columns(rows: Sequence[Sequence[float]]) -> np.ndarray:
    """Compensated column sums of per-chunk statistics, in chunk order."""
    rows = [np.atleast_1d(np.asarray(r, dtype=float)) for r in rows]
    if not rows:
        return np.zeros(0)
    stacked = np.vstack(rows)
    return np.array([math.fsum(stacked[:, j]) for j in range(stacked.shape[1])])
