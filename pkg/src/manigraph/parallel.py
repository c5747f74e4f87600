"""Thread-count resolution and deterministic ordered mapping.

Parallel sections always combine per-item results in item order, so outputs
are identical for any thread count. ``MANIGRAPH_THREADS`` mirrors the CLI
``--threads`` flag; ``--threads 1`` guarantees a single-threaded run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("MANIGRAPH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ordered_map(fn, items, threads: int | None = None) -> list:
    """Map ``fn`` over ``items``, returning results in input order."""
    t = resolve_threads(threads)
    items = list(items)
    if t <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(t, len(items))) as ex:
        return list(ex.map(fn, items))
