"""Thread-pool helpers shared by sweeps and the harness.

FREQUALIZE_THREADS caps the worker count.  Mapping preserves submission
order, so parallel sweeps produce byte-identical artifacts at any thread
count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

from .errors import ConfigError


def thread_count() -> int:
    env = os.environ.get("FREQUALIZE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"FREQUALIZE_THREADS: expected an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError(f"FREQUALIZE_THREADS: must be >= 1, got {n}")
        return n
    return min(4, os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map over independent work items."""
    workers = thread_count()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
