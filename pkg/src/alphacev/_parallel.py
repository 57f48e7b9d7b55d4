"""Fixed-size path blocks dispatched to an optional process pool.

Block boundaries depend only on the sample count, never on the number of
workers, and results are gathered in block order. Given the seed, every
estimate is therefore identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

BLOCK_SIZE = 2048

# stream ids are laid out as (tag << 32) | block, so each level of an
# experiment owns a disjoint range of streams
_BLOCK_BITS = 32


def stream_id(tag: int, block: int) -> int:
    if not 0 <= block < 1 << _BLOCK_BITS:
        raise ValueError(f"block index out of range: {block}")
    return (int(tag) << _BLOCK_BITS) | int(block)


def plan_blocks(total: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    """Split ``total`` paths into ``(block_index, size)`` chunks."""
    if total < 1:
        raise ValueError("need at least one path")
    return [(b, min(block_size, total - start)) for b, start in enumerate(range(0, total, block_size))]


def resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return int(workers)


def run_blocks(func, tasks: list[tuple], workers: int | None = 1) -> list:
    """Apply ``func(*task)`` to every task, returning results in task order."""
    workers = min(resolve_workers(workers), len(tasks))
    if workers <= 1:
        return [func(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, *zip(*tasks)))
