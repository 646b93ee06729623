from typing import Iterable, List, Optional, Sequence, Tuple
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError, DomainError
from app.models.ideals import IdealKind, IdealSpec
from app.models.schemas import DensityEstimate, EstimateMode, Verdict
from app.models.sets import SetGen
from app.models.weights import LinearWeight, WeightFn
from app.utils.checkpoints import (
    INCREASING,
    PINNED,
    checkpoint_plan,
    classify_trend,
    normalize_plan,
    window_start,
)

logger = logging.getLogger(__name__)


def resolve_max_n(max_n: Optional[int]) -> int:
    max_n = settings.DEFAULT_MAX_N if max_n is None else int(max_n)
    if max_n < 1:
        raise ArgumentError(f"maxN must be at least 1, got {max_n}")
    return max_n


def resolve_zero_tol(zero_tol: Optional[float]) -> float:
    zero_tol = settings.ZERO_TOL if zero_tol is None else float(zero_tol)
    if zero_tol <= 0:
        raise ArgumentError(f"zeroTol must be positive, got {zero_tol}")
    return zero_tol


def estimate_from_counts(
    counts: np.ndarray,
    weights: np.ndarray,
    max_n: int,
    plan: np.ndarray,
    mode: EstimateMode = EstimateMode.TAIL_MAX,
    label: Optional[str] = None,
    zero_tol: Optional[float] = None,
) -> DensityEstimate:
    """Ratios counts[n] / weights[n] along the plan, reduced to a limsup estimate."""
    ratios = counts[plan].astype(np.float64) / weights[plan]
    start = window_start(max_n)
    if mode == EstimateMode.TAIL_MAX:
        tail = ratios[plan >= start]
        value = float(tail.max()) if len(tail) else float(ratios[-1])
    else:
        value = float(ratios.max())
    early_max, late_max, trend = classify_trend(plan, ratios, start, max_n, zero_tol)
    return DensityEstimate(
        value=value,
        mode=mode,
        max_n=max_n,
        checkpoints=list(zip(plan.tolist(), ratios.tolist())),
        window_start=start,
        early_max=early_max,
        late_max=late_max,
        trend=trend,
        label=label,
    )


def upper_density(
    S: SetGen,
    g: Optional[WeightFn] = None,
    max_n: Optional[int] = None,
    checkpoints: Optional[Iterable[int]] = None,
    mode: EstimateMode = EstimateMode.TAIL_MAX,
    zero_tol: Optional[float] = None,
) -> DensityEstimate:
    """
    Estimate d*_g(S) = limsup |S ∩ [1, n]| / g(n) on [1, max_n].

    Counting is exact; only the final division is floating point. The plan
    defaults to the geometric grid plus the set's declared boundaries.
    """
    max_n = resolve_max_n(max_n)
    g = g or LinearWeight()
    weights = g.validated(max_n)
    if checkpoints is None:
        plan = checkpoint_plan(max_n, S.boundaries(max_n))
    else:
        plan = normalize_plan(checkpoints, max_n)
    estimate = estimate_from_counts(S.counts(max_n), weights, max_n, plan, mode, S.label, zero_tol)
    logger.debug(f"upper density of {S.label} with weight {g.label} up to {max_n}: {estimate.value:.6g}")
    return estimate


def shared_plan(sets: Sequence[SetGen], max_n: int) -> np.ndarray:
    """The geometric grid plus the boundaries of every set in the family."""
    boundaries = set()
    for S in sets:
        boundaries.update(S.boundaries(max_n))
    return checkpoint_plan(max_n, sorted(boundaries))


def upper_densities(
    sets: Sequence[SetGen],
    g: Optional[WeightFn] = None,
    max_n: Optional[int] = None,
    mode: EstimateMode = EstimateMode.TAIL_MAX,
    zero_tol: Optional[float] = None,
) -> List[DensityEstimate]:
    """
    Upper densities of several sets on one common plan.

    Default plans follow each set's own boundaries, so S ⊆ T does not imply
    upper_density(S) <= upper_density(T) between separate calls. On a shared
    plan the estimates are monotone under inclusion and subadditive under union.
    """
    if not sets:
        raise ArgumentError("need at least one set")
    max_n = resolve_max_n(max_n)
    plan = shared_plan(sets, max_n)
    return [upper_density(S, g, max_n, plan.tolist(), mode, zero_tol) for S in sets]


def uniform_density_zero_test(S: SetGen, max_n: Optional[int] = None, window_lens: Sequence[int] = ()) -> DensityEstimate:
    """Max over windows [k+1, k+n] inside [1, max_n] of |S ∩ window| / n, for each window length n."""
    max_n = resolve_max_n(max_n)
    lens = sorted(set(int(n) for n in window_lens))
    if not lens:
        raise ArgumentError("uniform density test needs at least one window length")
    if lens[0] < 1 or lens[-1] > max_n:
        raise ArgumentError(f"window lengths must lie in [1, {max_n}], got {lens[0]}..{lens[-1]}")

    counts = S.counts(max_n)
    trace: List[Tuple[int, float]] = []
    for length in lens:
        window_counts = counts[length:] - counts[: max_n - length + 1]
        trace.append((length, float(window_counts.max()) / length))

    ns = np.array([n for n, _ in trace], dtype=np.int64)
    ratios = np.array([r for _, r in trace], dtype=np.float64)
    start = window_start(lens[-1])
    early_max, late_max, trend = classify_trend(ns, ratios, start, lens[-1])
    return DensityEstimate(
        value=trace[-1][1],
        mode=EstimateMode.UNIFORM_WINDOW,
        max_n=max_n,
        checkpoints=trace,
        window_start=start,
        early_max=early_max,
        late_max=late_max,
        trend=trend,
        label=S.label,
    )


def uniform_window_plan(max_n: int) -> List[int]:
    """Window lengths 1, 2, 4, ... up to max_n / 4."""
    top = max(1, max_n // 4)
    lens = []
    length = 1
    while length <= top:
        lens.append(length)
        length *= 2
    return lens


def verdict_from_estimate(estimate: DensityEstimate, zero_tol: Optional[float] = None) -> Verdict:
    """Three-valued reading of a density estimate against zeroTol."""
    zero_tol = resolve_zero_tol(zero_tol)
    level = settings.VIOLATION_FACTOR * zero_tol
    if estimate.value <= zero_tol and estimate.trend != INCREASING:
        return Verdict.satisfied(f"estimate {estimate.value:.6g} <= {zero_tol:g}, tail {estimate.trend}")
    if estimate.value >= level and estimate.late_max >= level and estimate.trend in (PINNED, INCREASING):
        in_window = [(n, r) for n, r in estimate.checkpoints if n >= estimate.window_start]
        witness = max(in_window, key=lambda item: item[1])[0] if in_window else estimate.max_n
        return Verdict.violated(witness, f"estimate {estimate.value:.6g} with {estimate.trend} tail")
    return Verdict.inconclusive(
        f"estimate {estimate.value:.6g} with {estimate.trend} tail is undecided at this scale",
        bound=estimate.max_n,
    )


def fin_verdict(S: SetGen, max_n: int) -> Verdict:
    """Membership in Fin: exact for generated sets, tail rule for data-derived ones."""
    if S.declared_infinite is True:
        return Verdict.violated(S.next_after(max_n), f"{S.label} is infinite; members continue past {max_n}")
    if S.declared_infinite is False:
        if S.next_after(max_n) is None:
            return Verdict.satisfied(f"enumeration of {S.label} exhausts at or below {max_n}")
        return Verdict.inconclusive(f"finite set {S.label} has members beyond {max_n}", bound=max_n)

    members = S.members(max_n)
    if len(members) == 0:
        return Verdict.satisfied("no members")
    last = int(members[-1])
    if last < window_start(max_n):
        return Verdict.satisfied(f"members exhausted at {last}")
    if 8 * last > 7 * max_n:
        return Verdict.violated(last, f"members persist up to {last} near {max_n}")
    return Verdict.inconclusive(f"last member {last} lies inside the final window", bound=max_n)


def check_weight_growth(g: WeightFn, max_n: int) -> None:
    """A simple density weight must grow without bound across the evaluated range."""
    plan = checkpoint_plan(max_n)
    running = np.maximum.accumulate(g.validated(max_n)[plan])
    if len(running) > 1 and running[-1] <= running[0]:
        raise DomainError(f"weight {g.label} does not grow on [1, {max_n}]", n=max_n)
    if len(running) > 1 and running[-1] <= running[len(running) // 2]:
        logger.warning(f"weight {g.label} stops growing in the upper half of [1, {max_n}]")


def assess_membership(
    S: SetGen,
    ideal: IdealSpec,
    max_n: Optional[int] = None,
    zero_tol: Optional[float] = None,
) -> Tuple[DensityEstimate, Verdict]:
    """The estimate behind an ideal membership verdict, and the verdict itself."""
    max_n = resolve_max_n(max_n)
    zero_tol = resolve_zero_tol(zero_tol)

    if ideal.kind == IdealKind.UNIFORM_ZERO:
        estimate = uniform_density_zero_test(S, max_n, uniform_window_plan(max_n))
        return estimate, verdict_from_estimate(estimate, zero_tol)

    if ideal.kind == IdealKind.SIMPLE_DENSITY:
        check_weight_growth(ideal.weight, max_n)
    estimate = upper_density(S, ideal.density_weight(), max_n, zero_tol=zero_tol)
    if ideal.kind == IdealKind.FIN:
        return estimate, fin_verdict(S, max_n)
    return estimate, verdict_from_estimate(estimate, zero_tol)


def in_ideal(
    S: SetGen,
    ideal: IdealSpec,
    max_n: Optional[int] = None,
    zero_tol: Optional[float] = None,
) -> Verdict:
    return assess_membership(S, ideal, max_n, zero_tol)[1]
