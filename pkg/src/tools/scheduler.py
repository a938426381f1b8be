"""
Work scheduling utilities: sweep points, Monte-Carlo chunk plans, thread pool
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from src.utils.config import config
from src.utils.errors import DomainError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class Scheduler:
    """Plans sweeps and runs independent work items on a bounded thread pool"""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max(1, max_workers or config.threads)

    def generate_current_points(self, start: float, stop: float, step: float) -> np.ndarray:
        """Inclusive, monotone current sweep in mA"""
        if step <= 0 or stop < start:
            raise DomainError(f"invalid current sweep start={start} stop={stop} step={step}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(n)

    def plan_chunks(self, duration: float, event_rate: float,
                    max_events: float) -> List[float]:
        """Split an acquisition into chunks of at most ``max_events`` expected events"""
        if duration <= 0:
            raise DomainError(f"duration must be positive, got {duration}")
        expected = event_rate * duration
        n_chunks = max(1, int(math.ceil(expected / max_events)))
        return [duration / n_chunks] * n_chunks

    def map_ordered(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Apply ``func`` to every item; results keep the input order"""
        items = list(items)
        if self.max_workers == 1 or len(items) <= 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            return list(pool.map(func, items))


def is_monotone(values: Sequence[float]) -> bool:
    diffs = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(diffs > 0) or np.all(diffs < 0))
