"""Bounded thread pool for independent work items (cell batches, contour nodes, matrix rows, MC chunks)."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .config import get_settings

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(fn: Callable[[T], R], items: Iterable[T],
                threads: Optional[int] = None) -> List[R]:
    """Apply ``fn`` to every item; results come back in input order.

    With one thread nothing is spawned. Order matters: callers accumulate the
    results in a fixed sequence so sums are reproducible.
    """
    items = list(items)
    if threads is None:
        threads = get_settings().threads
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
