"""Order-preserving parallel map gated by the MEANDIM_THREADS variable."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_budget() -> int:
    try:
        return max(1, int(os.environ.get("MEANDIM_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """map(fn, items) with results in input order; threads only when asked."""
    items = list(items)
    workers = thread_budget()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
