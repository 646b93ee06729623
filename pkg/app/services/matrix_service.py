from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import NonnegativityError, SuiteError
from app.models.ideals import IdealSpec
from app.models.matrices import RowMatrix
from app.models.schemas import (
    ConditionReport,
    RegularityReport,
    SamplePairReport,
    ScalarTrace,
    Verdict,
    VerdictStatus,
    combine_verdicts,
)
from app.models.sequences import AffineSequence, LazySequence
from app.models.sets import Complement, FiniteSet, RangeSet, SetGen
from app.services.density_service import in_ideal, resolve_max_n
from app.services.sequence_service import resolve_eps_grid, verify_ideal_limit, verify_values_limit
from app.utils.checkpoints import checkpoint_plan, window_start
from app.utils.performance import timed

logger = logging.getLogger(__name__)


def apply(A: RowMatrix, x: LazySequence, n: int) -> float:
    """(Ax)_n = Σ_k a_{n,k} x_k."""
    return A.apply(x, n)


def _params(max_n: int, **extra: str) -> Dict[str, str]:
    params = {"maxN": str(max_n)}
    params.update({key: str(value) for key, value in extra.items()})
    return params


@timed
def check_T1(A: RowMatrix, max_n: Optional[int] = None, threads: Optional[int] = None) -> ConditionReport:
    """
    sup_n Σ_k |a_{n,k}| < ∞ at scale.

    Violated as soon as a row norm reaches DIVERGENCE_THRESHOLD; Satisfied
    when the running maximum grows by at most STABILITY_TOLERANCE across
    the final window.
    """
    max_n = resolve_max_n(max_n)
    norms = A.row_abs_sums(max_n, threads=threads)
    running = np.maximum.accumulate(norms)
    plan = checkpoint_plan(max_n, A.boundaries(max_n))
    start = window_start(max_n)
    start_value = float(running[start])
    value = float(running[max_n])
    growth = value / start_value if start_value > 0 else 1.0

    divergent = np.nonzero(norms >= settings.DIVERGENCE_THRESHOLD)[0]
    witness_row = int(divergent[0]) if len(divergent) else None
    trace = ScalarTrace(
        value=value,
        checkpoints=[(int(n), float(running[n])) for n in plan],
        window_start=start,
        start_value=start_value,
        growth=growth,
        witness_row=witness_row,
    )

    if witness_row is not None:
        verdict = Verdict.violated(
            witness_row,
            f"row norm {norms[witness_row]:g} reaches {settings.DIVERGENCE_THRESHOLD:g}",
        )
    elif value <= (1 + settings.STABILITY_TOLERANCE) * start_value or value == 0:
        verdict = Verdict.satisfied(f"M_N = {value:g} stable over the final window")
    else:
        verdict = Verdict.inconclusive(f"row norms still growing: M_N = {value:g}, growth {growth:.3g}", bound=max_n)

    logger.info(f"T1 for {A.label} up to {max_n}: {verdict.status.value}")
    return ConditionReport(condition="T1", matrix=A.label, verdict=verdict, trace=trace, params=_params(max_n))


@timed
def check_T2(
    A: RowMatrix,
    J: IdealSpec,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ConditionReport:
    """J-lim_n Σ_k a_{n,k} = 1."""
    max_n = resolve_max_n(max_n)
    sums = A.row_sums(max_n, threads=threads)
    limit = verify_values_limit(
        sums, 1.0, J, max_n, eps_grid, zero_tol, f"rowsum({A.label})", A.boundaries(max_n), threads
    )
    return ConditionReport(
        condition="T2", matrix=A.label, verdict=limit.verdict, limit=limit, params=_params(max_n, idealJ=J.label)
    )


@timed
def check_T3(
    A: RowMatrix,
    E: SetGen,
    I: Optional[IdealSpec],
    J: IdealSpec,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ConditionReport:
    """J-lim_n Σ_{k ∈ E} |a_{n,k}| = 0 for one declared member E of I."""
    max_n = resolve_max_n(max_n)
    warnings: List[str] = []
    if I is not None:
        membership = in_ideal(E, I, max_n, zero_tol)
        if membership.is_violated:
            message = f"{E.label} is not in {I.label} at scale; T3 on it says nothing about the matrix"
            logger.warning(message)
            warnings.append(message)

    sums = A.row_abs_sums(max_n, columns=E, threads=threads)
    limit = verify_values_limit(
        sums, 0.0, J, max_n, eps_grid, zero_tol, f"abs_rowsum({A.label}; {E.label})", A.boundaries(max_n), threads
    )
    params = _params(max_n, set=E.label, idealJ=J.label)
    if I is not None:
        params["idealI"] = I.label
    return ConditionReport(
        condition="T3", matrix=A.label, verdict=limit.verdict, limit=limit, params=params, warnings=warnings
    )


@timed
def check_T4(
    A: RowMatrix,
    istar_set: SetGen,
    I: IdealSpec,
    J: IdealSpec,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ConditionReport:
    """
    J-lim_n Σ_{k ∈ I*} a_{n,k} = 1 for a nonnegative matrix and a dual-filter set I*.

    Raises NonnegativityError on the first negative entry.
    """
    max_n = resolve_max_n(max_n)
    negative = A.first_negative(max_n)
    if negative is not None:
        n, k = negative
        raise NonnegativityError(f"{A.label} has a negative entry at ({n}, {k})", row=n, column=k)

    warnings: List[str] = []
    complement = Complement(istar_set)
    if not in_ideal(complement, I, max_n, zero_tol).is_satisfied:
        message = f"complement of {istar_set.label} is not certified in {I.label}"
        logger.warning(message)
        warnings.append(message)

    sums = A.row_sums(max_n, columns=istar_set, threads=threads)
    limit = verify_values_limit(
        sums, 1.0, J, max_n, eps_grid, zero_tol, f"rowsum({A.label}; {istar_set.label})", A.boundaries(max_n), threads
    )
    return ConditionReport(
        condition="T4",
        matrix=A.label,
        verdict=limit.verdict,
        limit=limit,
        params=_params(max_n, set=istar_set.label, idealI=I.label, idealJ=J.label),
        warnings=warnings,
    )


def check_S1(A: RowMatrix, max_n: Optional[int] = None, threads: Optional[int] = None) -> ConditionReport:
    report = check_T1(A, max_n, threads)
    return report.model_copy(update={"condition": "S1"})


def check_S2(
    A: RowMatrix,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ConditionReport:
    report = check_T2(A, IdealSpec.fin(), max_n, eps_grid, zero_tol, threads)
    return report.model_copy(update={"condition": "S2"})


def check_S3(
    A: RowMatrix,
    columns: Optional[Iterable[int]] = None,
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ConditionReport:
    """lim_n a_{n,k} = 0 for each declared column k: T3 with E = {k} and I = J = Fin."""
    max_n = resolve_max_n(max_n)
    columns = list(settings.S3_COLUMNS if columns is None else columns)
    fin = IdealSpec.fin()
    parts = [
        check_T3(A, FiniteSet([k]), fin, fin, max_n, eps_grid, zero_tol, threads).model_copy(
            update={"condition": f"S3:{k}"}
        )
        for k in columns
    ]
    verdict = combine_verdicts([part.verdict for part in parts], reason=f"columns {columns}")
    return ConditionReport(
        condition="S3", matrix=A.label, verdict=verdict, parts=parts, params=_params(max_n, columns=columns)
    )


def check_sliding(
    A: RowMatrix,
    ms: Iterable[int],
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ConditionReport:
    """lim_n Σ_{k <= m} |a_{n,k}| = 0 for each fixed m."""
    max_n = resolve_max_n(max_n)
    fin = IdealSpec.fin()
    parts = []
    for m in ms:
        part = check_T3(A, RangeSet(1, m), None, fin, max_n, eps_grid, zero_tol, threads)
        parts.append(part.model_copy(update={"condition": f"sliding:{m}"}))
    verdict = combine_verdicts([part.verdict for part in parts])
    return ConditionReport(condition="sliding", matrix=A.label, verdict=verdict, parts=parts, params=_params(max_n))


def _require_convergent(x: LazySequence, eta: float, I: IdealSpec, max_n: int, eps_grid, zero_tol, threads):
    report = verify_ideal_limit(x, eta, I, max_n, eps_grid, zero_tol, threads)
    if not report.verdict.is_satisfied:
        raise SuiteError(
            f"sample {x.label} is not {I.label}-convergent to {eta:g} at scale ({report.verdict.status.value})",
            sample=x.label,
        )
    return report


@timed
def check_c0_mapping(
    A: RowMatrix,
    I: IdealSpec,
    J: IdealSpec,
    samples: Sequence[LazySequence],
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ConditionReport:
    """For bounded samples with I-lim x = 0, check J-lim Ax = 0."""
    max_n = resolve_max_n(max_n)
    parts = []
    for x in samples:
        _require_convergent(x, 0.0, I, max_n, eps_grid, zero_tol, threads)
        image = A.apply_prefix(x, max_n, threads)
        limit = verify_values_limit(
            image, 0.0, J, max_n, eps_grid, zero_tol, f"{A.label}*{x.label}", A.boundaries(max_n), threads
        )
        parts.append(ConditionReport(condition=f"c0:{x.label}", matrix=A.label, verdict=limit.verdict, limit=limit))
    verdict = combine_verdicts([part.verdict for part in parts])
    return ConditionReport(
        condition="c0", matrix=A.label, verdict=verdict, parts=parts,
        params=_params(max_n, idealI=I.label, idealJ=J.label),
    )


def definite_disagreement(a: Verdict, b: Verdict) -> bool:
    definite = (VerdictStatus.SATISFIED, VerdictStatus.VIOLATED)
    return a.status in definite and b.status in definite and a.status != b.status


@timed
def check_regularity(
    A: RowMatrix,
    I: IdealSpec,
    J: IdealSpec,
    suite: Sequence[Tuple[LazySequence, float]],
    max_n: Optional[int] = None,
    eps_grid: Optional[Sequence[float]] = None,
    family: Sequence[SetGen] = (),
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> RegularityReport:
    """
    Direct (I, J)-regularity test: I-lim x = J-lim Ax on every suite pair,
    together with T1, T2 and T3 on the declared members of I.

    Raises SuiteError when a suite sequence is not I-convergent at scale.
    """
    max_n = resolve_max_n(max_n)
    grid = resolve_eps_grid(eps_grid)
    boundaries = A.boundaries(max_n)

    pairs: List[SamplePairReport] = []
    for x, eta in suite:
        input_limit = _require_convergent(x, eta, I, max_n, grid, zero_tol, threads)
        output = A.apply_prefix(x, max_n, threads)
        output_limit = verify_values_limit(
            output, eta, J, max_n, grid, zero_tol, f"{A.label}*{x.label}", boundaries, threads
        )
        shifted = AffineSequence(1.0, -eta, x)
        c0_output = A.apply_prefix(shifted, max_n, threads)
        c0_limit = verify_values_limit(
            c0_output, 0.0, J, max_n, grid, zero_tol, f"{A.label}*{shifted.label}", boundaries, threads
        )
        pairs.append(SamplePairReport(
            sample=x.label, eta=eta, input_limit=input_limit, output_limit=output_limit, c0_limit=c0_limit
        ))

    t1 = check_T1(A, max_n, threads)
    t2 = check_T2(A, J, max_n, grid, zero_tol, threads)
    t3 = [check_T3(A, E, I, J, max_n, grid, zero_tol, threads) for E in family]

    verdict = combine_verdicts(
        [pair.output_limit.verdict for pair in pairs] + [t1.verdict, t2.verdict],
        reason=f"{len(pairs)} suite pairs with T1 and T2",
    )
    c0_and_t2 = combine_verdicts([pair.c0_limit.verdict for pair in pairs] + [t2.verdict])
    consistent = not definite_disagreement(verdict, c0_and_t2)
    if not consistent:
        logger.error(f"regularity of {A.label}: direct verdict {verdict.status.value} vs c0 and T2 {c0_and_t2.status.value}")

    return RegularityReport(
        matrix=A.label,
        ideal_i=I.label,
        ideal_j=J.label,
        pairs=pairs,
        t1=t1,
        t2=t2,
        t3=t3,
        c0_and_t2=c0_and_t2,
        consistent=consistent,
        verdict=verdict,
    )
