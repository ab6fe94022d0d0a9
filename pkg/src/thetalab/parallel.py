"""Worker-pool map with deterministic result order.

The CLI owns the pool size; computational modules receive this map and never
spawn unmanaged concurrency.  Results always come back in input order, so a
parallel run serializes identically to a serial one.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence


def effective_jobs(requested: int) -> int:
    if requested <= 0:
        return max(1, os.cpu_count() or 1)
    return requested


def parallel_map(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """Order-preserving map; top-level picklable ``fn`` required for jobs > 1."""
    items = list(items)
    jobs = effective_jobs(jobs)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
