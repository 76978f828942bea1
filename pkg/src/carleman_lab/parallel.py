"""Ordered map over a thread pool whose width comes from CARLEMAN_LAB_THREADS."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable

ENV_VAR = "CARLEMAN_LAB_THREADS"


def pool_width(default: int | None = None) -> int:
    env = os.environ.get(ENV_VAR)
    if env:
        return max(1, int(env))
    return max(1, default or os.cpu_count() or 1)


def ordered_map(fn: Callable, items: Iterable, workers: int | None = None) -> list:
    """``[fn(x) for x in items]`` evaluated in a pool; results keep the input order."""
    items = list(items)
    width = min(pool_width(workers), max(1, len(items)))
    if width == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=width) as ex:
        return list(ex.map(fn, items))
