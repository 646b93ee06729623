from typing import Iterable, Optional, Tuple
import math
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError

logger = logging.getLogger(__name__)

INCREASING = "increasing"
PINNED = "pinned"
DECAYING = "decaying"


def geometric_checkpoints(max_n: int, ratio: Optional[float] = None) -> np.ndarray:
    """Sorted distinct values ceil(ratio**j) <= max_n, always ending at max_n."""
    if max_n < 1:
        raise ArgumentError(f"maxN must be at least 1, got {max_n}")
    ratio = settings.CHECKPOINT_RATIO if ratio is None else ratio
    if ratio <= 1:
        raise ArgumentError(f"checkpoint ratio must exceed 1, got {ratio}")
    points = set()
    power = 1.0
    while True:
        n = math.ceil(power)
        if n > max_n:
            break
        points.add(n)
        power *= ratio
    points.add(max_n)
    return np.array(sorted(points), dtype=np.int64)


def checkpoint_plan(max_n: int, boundaries: Iterable[int] = (), ratio: Optional[float] = None) -> np.ndarray:
    """
    Default plan: the geometric grid plus every declared boundary inside [1, max_n].

    Boundaries carry the structured subsequences along which upper densities
    are attained (block ends of generated sets).
    """
    base = geometric_checkpoints(max_n, ratio)
    extra = np.array([b for b in boundaries if 1 <= b <= max_n], dtype=np.int64)
    if len(extra) == 0:
        return base
    return np.union1d(base, extra)


def normalize_plan(checkpoints: Iterable[int], max_n: int) -> np.ndarray:
    plan = np.unique(np.asarray(list(checkpoints), dtype=np.int64))
    plan = plan[(plan >= 1) & (plan <= max_n)]
    if len(plan) == 0:
        raise ArgumentError(f"checkpoint plan has no point inside [1, {max_n}]")
    return plan


def window_start(max_n: int, fraction: Optional[float] = None) -> int:
    fraction = settings.TAIL_START_FRACTION if fraction is None else fraction
    return max(1, math.ceil(fraction * max_n))


def classify_trend(
    ns: np.ndarray,
    ratios: np.ndarray,
    start: int,
    end: int,
    zero_tol: Optional[float] = None,
) -> Tuple[float, float, str]:
    """
    Split the window [start, end] at its midpoint and compare the halves.

    Returns (early_max, late_max, trend). A rise that stays below the noise
    floor zero_tol / VIOLATION_FACTOR is not reported as increasing.
    """
    zero_tol = settings.ZERO_TOL if zero_tol is None else zero_tol
    noise_floor = zero_tol / settings.VIOLATION_FACTOR
    middle = (start + end) / 2.0
    inside = (ns >= start) & (ns <= end)
    early = ratios[inside & (ns < middle)]
    late = ratios[inside & (ns >= middle)]
    if len(late) == 0:
        late = early
    late_max = float(late.max()) if len(late) else 0.0
    early_max = float(early.max()) if len(early) else late_max

    if late_max > early_max and late_max > noise_floor:
        trend = INCREASING
    elif late_max >= settings.PINNED_RATIO * early_max:
        trend = PINNED
    else:
        trend = DECAYING
    return early_max, late_max, trend
