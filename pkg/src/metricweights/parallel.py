"""Deterministic chunked execution.

Worker threads only ever change wall-clock behaviour, never results: items are
split into contiguous chunks, each chunk is computed independently, and the
caller combines chunk results in chunk order. All reductions used by callers
(max, min, elementwise maximum) are insensitive to the split, so reports are
byte-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

R = TypeVar("R")


def chunk_ranges(n_items: int, workers: int) -> list[tuple[int, int]]:
    """Split range(n_items) into at most 4*workers contiguous chunks."""
    if n_items <= 0:
        return []
    workers = max(1, int(workers))
    n_chunks = min(n_items, max(1, 4 * workers if workers > 1 else 1))
    bounds = [round(i * n_items / n_chunks) for i in range(n_chunks + 1)]
    return [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_chunks(
    n_items: int,
    workers: int,
    worker_fn: Callable[[int, int], R],
) -> list[R]:
    """Apply worker_fn(start, stop) over contiguous chunks, results in order."""
    ranges = chunk_ranges(n_items, workers)
    if workers <= 1 or len(ranges) <= 1:
        return [worker_fn(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(worker_fn, a, b) for a, b in ranges]
        return [f.result() for f in futures]


def combine_scan_results(results: Sequence[tuple[float, tuple[int, int]]]) -> tuple[float, tuple[int, int]]:
    """Combine (value, witness) chunk maxima; earlier chunks win ties."""
    best = -float("inf")
    witness = (-1, -1)
    for value, wit in results:
        if value > best:
            best = value
            witness = wit
    return best, witness
