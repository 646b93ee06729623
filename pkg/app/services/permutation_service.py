from typing import Iterable, List, Optional, Sequence
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError
from app.models.ideals import IdealSpec
from app.models.matrices import PermutationMatrix
from app.models.permutations import Permutation
from app.models.schemas import (
    EpsilonEstimate,
    GrowthReport,
    GrowthTrace,
    IdealLimitReport,
    LevyReport,
    PermutationCheckReport,
    PermutationRegularityReport,
    ScalarTrace,
    Verdict,
    ZeroLimitPointReport,
    combine_verdicts,
)
from app.models.sets import DataSet, SetGen
from app.models.weights import LinearWeight, WeightFn
from app.services.density_service import (
    assess_membership,
    estimate_from_counts,
    resolve_max_n,
    resolve_zero_tol,
    upper_density,
    verdict_from_estimate,
)
from app.services.matrix_service import check_T1, check_T2, check_T3, definite_disagreement
from app.services.sequence_service import resolve_eps_grid, verify_values_limit
from app.utils.checkpoints import checkpoint_plan, normalize_plan, window_start
from app.utils.performance import parallel_map, timed

logger = logging.getLogger(__name__)


def sigma_hat(sigma: Permutation, n: int) -> float:
    """σ̂_n = n / σ^{-1}(n)."""
    if n < 1:
        raise ArgumentError(f"σ̂ is defined for n >= 1, got {n}")
    return n / sigma.inverse(n)


def sigma_hat_array(sigma: Permutation, max_n: int) -> np.ndarray:
    """σ̂_0..σ̂_maxN; slot 0 is 1."""
    ns = np.arange(1, max_n + 1, dtype=np.int64)
    values = np.ones(max_n + 1, dtype=np.float64)
    values[1:] = ns / sigma.inverse_array(ns).astype(np.float64)
    return values


def escaper_counts(sigma: Permutation, max_n: int) -> np.ndarray:
    """|{k <= n : σ(k) > n}| for n = 0..max_n."""
    ks = np.arange(1, max_n + 1, dtype=np.int64)
    images = sigma.forward_array(ks)
    moving = images > ks
    starts = ks[moving]
    stops = np.minimum(images[moving], max_n + 1)
    delta = np.bincount(starts, minlength=max_n + 2) - np.bincount(stops, minlength=max_n + 2)
    return np.cumsum(delta)[: max_n + 1]


def levy_companion(
    sigma: Permutation,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> IdealLimitReport:
    """Z-lim n / σ(n) = 1, the σ̂ of the inverse permutation; reported next to the Lévy test."""
    max_n = resolve_max_n(max_n)
    ns = np.arange(1, max_n + 1, dtype=np.int64)
    values = np.ones(max_n + 1, dtype=np.float64)
    values[1:] = ns / sigma.forward_array(ns).astype(np.float64)
    return verify_values_limit(
        values, 1.0, IdealSpec.z(), max_n, eps_grid, zero_tol,
        f"n/{sigma.label}(n)", sigma.boundaries(max_n), threads,
    )


@timed
def levy_group_test(
    sigma: Permutation,
    max_n: Optional[int] = None,
    checkpoints: Optional[Iterable[int]] = None,
    zero_tol: Optional[float] = None,
    with_companion: bool = True,
    threads: Optional[int] = None,
) -> LevyReport:
    """
    lim_n (1/n)|{k <= n : σ(k) > n}| = 0 at scale.

    Args:
        sigma: The permutation under test
        max_n: Prefix length
        checkpoints: Optional explicit plan; defaults to the geometric grid plus σ's block ends
        zero_tol: Zero tolerance for the verdict
        with_companion: Also report Z-lim n/σ(n) = 1, without asserting any link

    Returns:
        LevyReport with the escaper-fraction estimate and its verdict
    """
    max_n = resolve_max_n(max_n)
    zero_tol = resolve_zero_tol(zero_tol)
    if checkpoints is None:
        plan = checkpoint_plan(max_n, sigma.boundaries(max_n))
    else:
        plan = normalize_plan(checkpoints, max_n)
    counts = escaper_counts(sigma, max_n)
    estimate = estimate_from_counts(
        counts, LinearWeight().values(max_n), max_n, plan, label=f"escapers({sigma.label})", zero_tol=zero_tol
    )
    verdict = verdict_from_estimate(estimate, zero_tol)
    companion = levy_companion(sigma, max_n, zero_tol=zero_tol, threads=threads) if with_companion else None
    logger.info(f"Levy test for {sigma.label} up to {max_n}: {verdict.status.value}")
    return LevyReport(permutation=sigma.label, estimate=estimate, verdict=verdict, companion=companion)


def image_set(sigma: Permutation, E: SetGen, max_n: int) -> DataSet:
    """σ(E) ∩ [1, max_n]: n is in the image iff σ^{-1}(n) is in E."""
    ns = np.arange(1, max_n + 1, dtype=np.int64)
    mask = np.zeros(max_n + 1, dtype=bool)
    mask[1:] = E.contains_array(sigma.inverse_array(ns))
    return DataSet(mask, f"{sigma.label}({E.label})", sigma.boundaries(max_n))


@timed
def check_P3(
    sigma: Permutation,
    E: SetGen,
    J: IdealSpec,
    max_n: Optional[int] = None,
    zero_tol: Optional[float] = None,
) -> PermutationCheckReport:
    """σ(E) ∈ J for one declared member E of I."""
    max_n = resolve_max_n(max_n)
    estimate, verdict = assess_membership(image_set(sigma, E, max_n), J, max_n, zero_tol)
    return PermutationCheckReport(condition="P3", permutation=sigma.label, set=E.label, estimate=estimate, verdict=verdict)


@timed
def check_P4_zero_limit_point(
    sigma: Permutation,
    h: Optional[WeightFn] = None,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ZeroLimitPointReport:
    """
    0 is not a J-limit point of σ̂: d*_h({n : σ̂_n < ε}) → 0 as ε → 0.

    Satisfied when the estimate at the smallest ε is certified zero,
    Violated when every ε leaves a pinned positive density.
    """
    max_n = resolve_max_n(max_n)
    zero_tol = resolve_zero_tol(zero_tol)
    h = h or LinearWeight()
    grid = resolve_eps_grid(eps_grid, settings.PERMUTATION_EPS_GRID)
    hats = sigma_hat_array(sigma, max_n)
    boundaries = sigma.boundaries(max_n)

    def per_eps(eps: float) -> EpsilonEstimate:
        mask = hats < eps
        mask[0] = False
        small = DataSet(mask, f"{{n: hat({sigma.label})_n < {eps:g}}}", boundaries)
        estimate = upper_density(small, h, max_n, zero_tol=zero_tol)
        return EpsilonEstimate(eps=eps, estimate=estimate, verdict=verdict_from_estimate(estimate, zero_tol))

    results = parallel_map(per_eps, grid, threads)
    last = results[-1]
    if last.verdict.is_satisfied:
        verdict = Verdict.satisfied(f"d*_{h.label} of the ε-set is {last.estimate.value:.6g} at ε = {last.eps:g}")
    elif all(item.verdict.is_violated for item in results):
        verdict = Verdict.violated(last.verdict.witness, f"σ̂ accumulates at 0 on a set of {h.label}-density {last.estimate.value:.6g}")
    else:
        verdict = Verdict.inconclusive("ε-set densities do not settle along the grid", bound=max_n)
    return ZeroLimitPointReport(permutation=sigma.label, weight=h.label, per_eps=results, verdict=verdict)


def _running_trace(values: np.ndarray, max_n: int) -> ScalarTrace:
    running = np.maximum.accumulate(values)
    plan = checkpoint_plan(max_n)
    start = window_start(max_n)
    start_value = float(running[start])
    value = float(running[max_n])
    return ScalarTrace(
        value=value,
        checkpoints=[(int(n), float(running[n])) for n in plan],
        window_start=start,
        start_value=start_value,
        growth=value / start_value if start_value > 0 else 1.0,
    )


def _trace_verdict(trace: ScalarTrace, max_n: int) -> Verdict:
    if trace.value >= settings.DIVERGENCE_THRESHOLD:
        return Verdict.violated(max_n, f"running max {trace.value:g} reaches {settings.DIVERGENCE_THRESHOLD:g}")
    if trace.value <= (1 + settings.STABILITY_TOLERANCE) * trace.start_value:
        return Verdict.satisfied(f"running max {trace.value:g} stable over the final window")
    return Verdict.inconclusive(f"running max still growing: growth {trace.growth:.3g}", bound=max_n)


@timed
def check_growth_condition(
    g: WeightFn,
    h: WeightFn,
    alphas: Sequence[float] = (2.0,),
    max_n: Optional[int] = None,
) -> GrowthReport:
    """
    limsup n/g(n) < ∞ and limsup g(⌊αn⌋)/h(n) < ∞ for each α > 1.

    g is evaluated up to ⌊α·maxN⌋; table weights that stop earlier raise RangeError.
    """
    max_n = resolve_max_n(max_n)
    alphas = [float(a) for a in alphas]
    if not alphas or any(a <= 1 for a in alphas):
        raise ArgumentError(f"growth condition needs α > 1, got {alphas}")

    ns = np.arange(max_n + 1, dtype=np.int64)
    h_values = h.validated(max_n)
    g_base = g.validated(max_n)
    inverse_values = ns / g_base
    inverse_values[0] = 0.0
    inverse = _running_trace(inverse_values, max_n)

    traces: List[GrowthTrace] = []
    for a in alphas:
        top = int(np.floor(a * max_n))
        g_values = g.validated(top)
        scaled = np.floor(a * ns).astype(np.int64)
        ratio_values = g_values[scaled] / h_values
        ratio_values[0] = 0.0
        ratio = _running_trace(ratio_values, max_n)
        verdict = combine_verdicts(
            [_trace_verdict(inverse, max_n), _trace_verdict(ratio, max_n)],
            reason=f"n/g and g(⌊{a:g}n⌋)/h bounded at scale",
        )
        traces.append(GrowthTrace(alpha=a, ratio=ratio, inverse=inverse, verdict=verdict))
        logger.info(f"growth condition g={g.label}, h={h.label}, α={a:g}: {verdict.status.value}")

    verdict = combine_verdicts([trace.verdict for trace in traces])
    return GrowthReport(g=g.label, h=h.label, traces=traces, verdict=verdict)


@timed
def permutation_regularity(
    sigma: Permutation,
    I: IdealSpec,
    J: IdealSpec,
    family: Sequence[SetGen],
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> PermutationRegularityReport:
    """
    (I, J)-regularity of A_σ two ways: σ(E) ∈ J for every declared E, and
    T1, T2 and T3 of the permutation matrix. Any definite disagreement
    between P3 and T3 on the same set is reported as an inconsistency.
    """
    max_n = resolve_max_n(max_n)
    if not family:
        raise ArgumentError("permutation regularity needs at least one declared member of I")
    A = PermutationMatrix(sigma)

    p3 = [check_P3(sigma, E, J, max_n, zero_tol) for E in family]
    t1 = check_T1(A, max_n, threads)
    t2 = check_T2(A, J, max_n, eps_grid, zero_tol, threads)
    t3 = [check_T3(A, E, I, J, max_n, eps_grid, zero_tol, threads) for E in family]
    p4 = check_P4_zero_limit_point(sigma, J.density_weight(), max_n, zero_tol=zero_tol, threads=threads)
    levy = levy_group_test(sigma, max_n, zero_tol=zero_tol, threads=threads)

    disagreements = [
        f"{p.set}: P3 {p.verdict.status.value} vs T3 {t.verdict.status.value}"
        for p, t in zip(p3, t3)
        if definite_disagreement(p.verdict, t.verdict)
    ]
    for item in disagreements:
        logger.error(f"permutation {sigma.label}: {item}")

    verdict = combine_verdicts(
        [p.verdict for p in p3] + [t1.verdict, t2.verdict],
        reason=f"σ(E) ∈ {J.label} on {len(family)} declared sets with T1 and T2",
    )
    return PermutationRegularityReport(
        permutation=sigma.label,
        ideal_i=I.label,
        ideal_j=J.label,
        p3=p3,
        t1=t1,
        t2=t2,
        t3=t3,
        p4=p4,
        levy=levy,
        consistent=not disagreements,
        disagreements=disagreements,
        verdict=verdict,
    )
