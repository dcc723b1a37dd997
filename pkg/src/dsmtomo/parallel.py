"""Thread-count resolution and a deterministic chunked map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, then ``TOMO_THREADS``, then the CPU count."""
    if threads is None:
        env = os.environ.get("TOMO_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ValueError(f"TOMO_THREADS must be an integer, got {env!r}") from None
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    return threads


def chunk_ranges(n: int, size: int) -> list[tuple[int, int]]:
    return [(i, min(i + size, n)) for i in range(0, n, size)]


def map_chunks(fn, n: int, size: int, threads: int | None = None) -> None:
    """Call ``fn(lo, hi)`` for consecutive chunks of ``range(n)``.

    Each chunk writes its own disjoint output slice, so the result does not
    depend on scheduling or on the number of workers.
    """
    ranges = chunk_ranges(n, size)
    workers = min(resolve_threads(threads), max(len(ranges), 1))
    if workers == 1:
        for lo, hi in ranges:
            fn(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(fn, lo, hi) for lo, hi in ranges]:
            fut.result()
