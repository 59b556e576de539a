"""Seeded random streams.

Every random draw in the package goes through :func:`substream`, which keys a
counter-based Philox generator on ``(seed, *path)``.  Two calls with the same
seed and path produce the same stream on every platform, no matter how the
work is split across threads.
"""
from __future__ import annotations

import os

import numpy as np

GENERATOR_ID = "philox4x64/seedsequence"

# fixed chunk size for sample partitioning; changing it changes every estimate
CHUNK = 4096


def substream(seed: int, *path: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def chunk_sizes(total: int, chunk: int = CHUNK) -> list[int]:
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def max_threads() -> int:
    """Thread cap from ``PERMLAB_THREADS`` (default 1)."""
    raw = os.environ.get("PERMLAB_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"PERMLAB_THREADS must be an integer, got {raw!r}") from None
    return max(1, value)


def map_chunks(fn, items):
    """Apply ``fn`` to each item, possibly on a thread pool, keeping input order."""
    items = list(items)
    workers = min(max_threads(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
