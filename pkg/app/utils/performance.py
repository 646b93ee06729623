import time
import functools
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, TypeVar
import logging

from app.core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def timed(func):
    """
    Decorator to measure and log the execution time of a service call.

    Timings go to the log only, never into report payloads.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        execution_time = time.perf_counter() - start_time
        logger.info(f"Function {func.__name__} executed in {execution_time:.4f} seconds")
        return result
    return wrapper


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        threads = settings.THREADS
    return max(1, int(threads))


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Run func over items on a thread pool and return results in input order

    Args:
        func: The function to run on every item
        items: The work items
        threads: Worker cap; 1 runs inline

    Returns:
        List of results, ordered like items regardless of completion order
    """
    work = list(items)
    workers = min(resolve_threads(threads), len(work))
    if workers <= 1:
        return [func(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, work))


class PrefixCache:
    """
    Per-object memo for materialized prefixes, keyed by bound.

    Only the largest materialization is kept for each key family; smaller
    requests are served by slicing it.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: Dict[Hashable, Any] = {}

    def get_or_build(self, key: Hashable, bound: int, build: Callable[[int], Any], cut: Callable[[Any, int], Any]):
        with self._lock:
            entry = self._entries.get(key)
        if entry is not None and entry[0] >= bound:
            return cut(entry[1], bound) if entry[0] > bound else entry[1]
        value = build(bound)
        with self._lock:
            current = self._entries.get(key)
            if current is None or current[0] < bound:
                self._entries[key] = (bound, value)
        return value

    def clear(self):
        with self._lock:
            self._entries = {}
        logger.debug("Prefix cache cleared")
