from typing import Iterable, List, Optional, Sequence
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError
from app.models.ideals import IdealSpec
from app.models.schemas import EpsilonEstimate, IdealLimitReport, combine_verdicts
from app.models.sequences import LazySequence
from app.models.sets import DataSet
from app.services.density_service import assess_membership, in_ideal, resolve_max_n, resolve_zero_tol
from app.utils.performance import parallel_map

logger = logging.getLogger(__name__)


def resolve_eps_grid(eps_grid: Optional[Sequence[float]] = None, default: Optional[Sequence[float]] = None) -> List[float]:
    """Validate an epsilon grid: positive and strictly decreasing."""
    if eps_grid is None:
        eps_grid = settings.DEFAULT_EPS_GRID if default is None else default
    grid = [float(eps) for eps in eps_grid]
    if not grid:
        raise ArgumentError("epsilon grid is empty")
    if any(eps <= 0 for eps in grid):
        raise ArgumentError(f"epsilon grid must be positive, got {grid}")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ArgumentError(f"epsilon grid must be strictly decreasing, got {grid}")
    return grid


def verify_values_limit(
    values: np.ndarray,
    eta: float,
    ideal: IdealSpec,
    max_n: int,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    label: str = "x",
    boundaries: Iterable[int] = (),
    threads: Optional[int] = None,
) -> IdealLimitReport:
    """
    I-limit test on an already evaluated prefix values[0..max_n].

    Every epsilon yields the exceptional set {n <= max_n : |x_n - eta| > eps},
    whose membership in the ideal is assessed independently.
    """
    grid = resolve_eps_grid(eps_grid)
    zero_tol = resolve_zero_tol(zero_tol)
    deviations = np.abs(np.asarray(values[: max_n + 1], dtype=np.float64) - eta)
    deviations[0] = 0.0
    marks = list(boundaries)

    def per_eps(eps: float) -> EpsilonEstimate:
        exceptional = DataSet(deviations > eps, f"{{n: |{label} - {eta:g}| > {eps:g}}}", marks)
        estimate, verdict = assess_membership(exceptional, ideal, max_n, zero_tol)
        return EpsilonEstimate(eps=eps, estimate=estimate, verdict=verdict)

    results = parallel_map(per_eps, grid, threads)
    verdict = combine_verdicts(
        [item.verdict for item in results],
        reason=f"{ideal.label}-lim {label} = {eta:g} tested on {len(grid)} scales up to {max_n}",
    )
    return IdealLimitReport(
        sequence=label,
        ideal=ideal.label,
        candidate=eta,
        eps_grid=grid,
        per_eps=results,
        verdict=verdict,
    )


def verify_ideal_limit(
    x: LazySequence,
    eta: float,
    ideal: IdealSpec,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> IdealLimitReport:
    """
    Check I-lim x = eta on [1, max_n].

    Raises BoundError when x breaks its declared bound while being evaluated.
    """
    max_n = resolve_max_n(max_n)
    values = x.prefix(max_n)
    return verify_values_limit(
        values, eta, ideal, max_n, eps_grid, zero_tol, x.label, x.boundaries(max_n), threads
    )


def propose_ideal_limit(
    x: LazySequence,
    ideal: IdealSpec,
    max_n: Optional[int] = None,
    zero_tol: Optional[float] = None,
    bins: Optional[int] = None,
) -> Optional[float]:
    """
    Candidate ideal limit of a bounded sequence, or None.

    The values are binned uniformly over [-B, B]; a bin qualifies when the
    set of indices falling outside it belongs to the ideal. A unique
    qualifying bin yields the median of its values; anything else abstains.
    """
    max_n = resolve_max_n(max_n)
    zero_tol = resolve_zero_tol(zero_tol)
    bins = settings.HISTOGRAM_BINS if bins is None else int(bins)
    values = x.prefix(max_n)[1:]
    bound = x.declared_bound if x.declared_bound is not None else float(np.abs(values).max())
    if bound == 0:
        return 0.0

    index = np.clip(np.floor((values + bound) / (2 * bound) * bins).astype(np.int64), 0, bins - 1)
    populated = np.nonzero(np.bincount(index, minlength=bins))[0]
    qualifying = []
    for b in populated.tolist():
        outside = np.concatenate([[False], index != b])
        verdict = in_ideal(DataSet(outside, f"outside bin {b}"), ideal, max_n, zero_tol)
        if verdict.is_satisfied:
            qualifying.append(b)

    if len(qualifying) != 1:
        logger.info(f"no unique limit candidate for {x.label}: {len(qualifying)} bins qualify")
        return None
    candidate = float(np.median(values[index == qualifying[0]]))
    logger.info(f"limit candidate for {x.label} under {ideal.label}: {candidate:g}")
    return candidate
