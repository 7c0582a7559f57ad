"""
Ordered parallel map with deterministic reduction.

Work items are mapped on a thread pool (numpy releases the GIL inside the heavy
array kernels) and results come back in submission order, so that every
reduction below sums in a fixed order and reruns are bit-stable.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from ..config import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply ``func`` to every item and return the results in input order.

    Args:
        func: Function of one item
        items: Work items
        workers: Thread cap; defaults to FRACSOB_THREADS

    Returns:
        List of results, ordered like ``items``
    """
    items = list(items)
    workers = workers or get_settings().threads
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))


def chunked(seq: Sequence[T], n_chunks: int) -> List[Sequence[T]]:
    """Split a sequence into at most ``n_chunks`` contiguous pieces."""
    if not seq:
        return []
    n_chunks = max(1, min(n_chunks, len(seq)))
    size = math.ceil(len(seq) / n_chunks)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def ordered_sum(values: Iterable[float]) -> float:
    """Exactly rounded sum, independent of how the partials were produced."""
    return math.fsum(values)
