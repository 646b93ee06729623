from typing import List, Optional, Sequence
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError, BoundError, ConsistencyError, PreconditionError
from app.models.ideals import IdealSpec
from app.models.matrices import DiagonalMatrix
from app.models.schemas import (
    DiagonalProbeReport,
    InclusionSuiteReport,
    MultiplierReport,
    SetLimitReport,
    SetVerdict,
    Verdict,
    combine_verdicts,
)
from app.models.sequences import IndicatorSequence, LazySequence, MaskedSequence
from app.models.sets import SetGen
from app.services.density_service import in_ideal, resolve_max_n
from app.services.matrix_service import check_T1, check_T3, definite_disagreement
from app.services.sequence_service import verify_values_limit
from app.utils.checkpoints import window_start
from app.utils.performance import parallel_map, timed

logger = logging.getLogger(__name__)


@timed
def multiplier_check(
    s: LazySequence,
    family: Sequence[SetGen],
    J: IdealSpec,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> MultiplierReport:
    """
    s ∈ m(c_0(I) ∩ ℓ∞, c_0(J) ∩ ℓ∞): s bounded and J-lim s·1_E = 0 for every declared E ∈ I.

    The same question is asked of diag(s) through T1 and T3; a definite
    disagreement between the two paths raises ConsistencyError.
    """
    max_n = resolve_max_n(max_n)
    if not family:
        raise ArgumentError("multiplier check needs at least one declared member of I")

    try:
        values = s.prefix(max_n)
    except BoundError as error:
        logger.warning(f"multiplier {s.label}: {error.detail}")
        return MultiplierReport(
            sequence=s.label,
            ideal_j=J.label,
            sup_abs=abs(error.value) if error.value is not None else 0.0,
            sup_index=error.index or 0,
            bound_error=error.detail,
            verdict=Verdict.violated(error.index, "s is not bounded, so it is no multiplier of bounded spaces"),
        )

    magnitudes = np.abs(values)
    sup_index = int(np.argmax(magnitudes))
    sup_abs = float(magnitudes[sup_index])

    D = DiagonalMatrix(s)
    t1 = check_T1(D, max_n, threads)
    if t1.verdict.is_violated:
        detail = f"|s_n| reaches {settings.DIVERGENCE_THRESHOLD:g} at n={t1.verdict.witness}"
        logger.warning(f"multiplier {s.label}: {detail}")
        return MultiplierReport(
            sequence=s.label,
            ideal_j=J.label,
            sup_abs=sup_abs,
            sup_index=sup_index,
            bound_error=detail,
            t1=t1,
            matrix_verdict=t1.verdict,
            verdict=Verdict.violated(t1.verdict.witness, "s is unbounded at scale"),
        )

    boundaries = D.boundaries(max_n)

    def per_set(E: SetGen) -> SetLimitReport:
        masked = MaskedSequence(E, s)
        limit = verify_values_limit(
            masked.prefix(max_n), 0.0, J, max_n, eps_grid, zero_tol, masked.label, boundaries, threads
        )
        return SetLimitReport(set=E.label, limit=limit)

    per_set_reports = parallel_map(per_set, family, threads)
    t3 = [check_T3(D, E, None, J, max_n, eps_grid, zero_tol, threads) for E in family]

    verdict = combine_verdicts(
        [t1.verdict] + [item.limit.verdict for item in per_set_reports],
        reason=f"{J.label}-lim s·1_E = 0 on {len(family)} declared sets",
    )
    matrix_verdict = combine_verdicts([t1.verdict] + [part.verdict for part in t3], reason="T1 and T3 of diag(s)")
    if definite_disagreement(verdict, matrix_verdict):
        raise ConsistencyError(
            f"multiplier {s.label}: sequence path {verdict.status.value} vs diagonal path {matrix_verdict.status.value}"
        )

    logger.info(f"multiplier {s.label} into {J.label}: {verdict.status.value}")
    return MultiplierReport(
        sequence=s.label,
        ideal_j=J.label,
        sup_abs=sup_abs,
        sup_index=sup_index,
        per_set=per_set_reports,
        t1=t1,
        t3=t3,
        matrix_verdict=matrix_verdict,
        consistent=True,
        verdict=verdict,
    )


@timed
def corollary_inclusion_suite(
    family: Sequence[SetGen],
    J: IdealSpec,
    samples: Sequence[LazySequence],
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> InclusionSuiteReport:
    """
    When every declared E lies in J, every bounded s is a multiplier.

    Raises PreconditionError when a family set is not certified in J and
    ConsistencyError when a bounded sample fails anyway.
    """
    max_n = resolve_max_n(max_n)
    preconditions: List[SetVerdict] = []
    for E in family:
        verdict = in_ideal(E, J, max_n, zero_tol)
        preconditions.append(SetVerdict(set=E.label, verdict=verdict))
        if not verdict.is_satisfied:
            raise PreconditionError(f"{E.label} is not certified in {J.label} ({verdict.status.value})")

    reports = []
    for s in samples:
        report = multiplier_check(s, family, J, max_n, eps_grid, zero_tol, threads)
        if not report.verdict.is_satisfied:
            raise ConsistencyError(
                f"bounded sample {s.label} is not a multiplier ({report.verdict.status.value}) although every declared set lies in {J.label}"
            )
        reports.append(report)

    return InclusionSuiteReport(
        ideal_j=J.label,
        preconditions=preconditions,
        samples=reports,
        verdict=Verdict.satisfied(f"{len(reports)} bounded samples are multipliers"),
    )


@timed
def diagonal_unbounded_probe(
    s: LazySequence,
    E: SetGen,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> DiagonalProbeReport:
    """
    diag(s)·1_E against two readings: its running sup, and its Z-limit.

    For s = n on the squares and E = squares the image is unbounded but
    still Z-converges to 0, so diag(s) maps c_0(Z) outside ℓ∞.
    """
    max_n = resolve_max_n(max_n)
    D = DiagonalMatrix(s)
    image = D.apply_prefix(IndicatorSequence(E), max_n, threads)
    magnitudes = np.abs(image)
    running = np.maximum.accumulate(magnitudes)
    sup_index = int(np.argmax(magnitudes))
    sup_value = float(magnitudes[sup_index])
    start_value = float(running[window_start(max_n)])
    unbounded = sup_value >= settings.DIVERGENCE_THRESHOLD or sup_value > (1 + settings.STABILITY_TOLERANCE) * start_value
    image_limit = verify_values_limit(
        image, 0.0, IdealSpec.z(), max_n, eps_grid, zero_tol, f"{D.label}*1_{E.label}", E.boundaries(max_n), threads
    )
    return DiagonalProbeReport(
        sequence=s.label,
        set=E.label,
        sup_value=sup_value,
        sup_index=sup_index,
        unbounded=unbounded,
        image_limit=image_limit,
    )
