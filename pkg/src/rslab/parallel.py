"""Deterministic block-parallel helpers.

Work is always split on a fixed block grid that depends only on the input
range, never on the number of workers, and partial results are merged in
block order.  Changing ``threads`` therefore cannot change a single bit of
the output.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

BLOCK = 1 << 16
_threads = 1


def set_threads(n: int) -> None:
    """Cap on worker threads used by block-parallel loops (CLI --threads)."""
    global _threads
    _threads = max(1, int(n))


def get_threads() -> int:
    return _threads


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int | None = None) -> list[R]:
    """map() whose result order matches ``items`` regardless of worker count."""
    workers = get_threads() if threads is None else max(1, threads)
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def block_fsum(arr: np.ndarray, a: int, b: int, threads: int | None = None) -> float:
    """Sum of arr[a:b] by per-block fsum merged with fsum in block order."""
    if b <= a:
        return 0.0
    edges = list(range(a, b, BLOCK)) + [b]
    spans = list(zip(edges[:-1], edges[1:]))
    parts = ordered_map(lambda s: math.fsum(arr[s[0] : s[1]].tolist()), spans, threads)
    return math.fsum(parts)
