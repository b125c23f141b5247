"""Worker-pool sizing and a deterministic parallel map.

BMO_LAB_THREADS caps the worker count (default: available cores).
Results come back in input order, so max/merge reductions downstream
stay deterministic regardless of scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigurationError


def worker_count() -> int:
    raw = os.environ.get("BMO_LAB_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigurationError(f"BMO_LAB_THREADS must be an integer, got {raw!r}") from exc
        if n < 1:
            raise ConfigurationError("BMO_LAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Map fn over items, in order, using at most worker_count() threads."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
