"""
Utility functions for Mather Hull
"""
import sys
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np

from config import settings

T = TypeVar("T")
R = TypeVar("R")


def log(message: str, level: str = "INFO") -> None:
    """Print a tagged log line to stderr if the level is enabled"""
    level = level.upper()
    # [OK] lines are informational
    enabled_as = "INFO" if level == "OK" else level
    if enabled_as in settings.LOG_LEVELS:
        print(f"[{level}] {message}", file=sys.stderr)


def make_rng(seed: Optional[int]) -> np.random.Generator:
    """Seeded generator; every randomized routine takes one of these"""
    return np.random.default_rng(seed)


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Map fn over items, in parallel when MATHER_HULL_THREADS > 1.

    Results come back in input order, so reductions over them stay deterministic.
    """
    items = list(items)
    if settings.THREADS <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
        return list(pool.map(fn, items))


def generate_run_id(prefix: str) -> str:
    """Generate a unique run id with prefix"""
    timestamp = datetime.now().strftime("%Y%m%d%H%M%S")
    unique_id = str(uuid.uuid4())[:8].upper()
    return f"{prefix}-{timestamp}-{unique_id}"


def calculate_fraction(count: int, total: int) -> float:
    """Fraction count/total, 0 for an empty total"""
    if total == 0:
        return 0.0
    return count / total
