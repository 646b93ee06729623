from fractions import Fraction
from math import factorial
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError
from app.models.counterexample import (
    CounterexampleMatrix,
    CounterexampleParams,
    RSet,
    alpha,
    block_rows,
    lam,
)
from app.models.ideals import IdealSpec
from app.models.matrices import IdentityMatrix, RowMatrix, SumMatrix
from app.models.schemas import (
    BlockInvariantReport,
    BlockInvariantsReport,
    CounterexampleParamsSchema,
    CounterexampleReport,
    DensityOfRReport,
    Verdict,
    WitnessStatus,
    WitnessStep,
    WitnessTrace,
    WllnBlockReport,
    WllnReport,
)
from app.models.sequences import (
    AffineSequence,
    ConstantSequence,
    IndicatorSequence,
    LazySequence,
    SignSequence,
)
from app.models.sets import SetGen
from app.models.weights import LinearWeight
from app.services.density_service import resolve_max_n, resolve_zero_tol, upper_density
from app.services.matrix_service import check_regularity, check_T1, check_T2, check_T3
from app.utils.checkpoints import checkpoint_plan, window_start
from app.utils.performance import timed
from app.utils.summation import compensated_sum

logger = logging.getLogger(__name__)

R_DENSITY_THRESHOLD = 0.30
ORACLE_TOLERANCE = 1e-12
S_SET_SAMPLE = 200


def build_counterexample_A(params: CounterexampleParams) -> CounterexampleMatrix:
    return CounterexampleMatrix(params)


def build_counterexample_B(params: CounterexampleParams) -> SumMatrix:
    """B = A + Id."""
    return SumMatrix(
        build_counterexample_A(params),
        IdentityMatrix(),
        label=f"counterexample-b:{params.i_set.label}:{params.max_block}",
    )


def params_schema(params: CounterexampleParams) -> CounterexampleParamsSchema:
    return CounterexampleParamsSchema.model_validate(params.to_json())


@timed
def verify_block_invariants(params: CounterexampleParams) -> BlockInvariantsReport:
    """
    Per block: m! <= 2^λ_m <= 2·m!, |R_m| = 2^λ_m, |C_m| = λ_m, separation of
    consecutive blocks, distinct sign vectors and balanced columns.

    Signs are read back from the generated rows, streamed in chunks.
    """
    A = build_counterexample_A(params)
    reports: List[BlockInvariantReport] = []
    for m in params.blocks():
        lo, hi = block_rows(m)
        lam_m = lam(m)
        columns = params.block_columns(m)
        separated = m == params.max_block or hi < block_rows(m + 1)[0]
        lambda_bounds = factorial(m) <= 2 ** lam_m <= 2 * factorial(m)

        seen = np.zeros(2 ** lam_m, dtype=bool)
        plus = np.zeros(lam_m, dtype=np.int64)
        shape_ok = True
        weights = np.left_shift(np.int64(1), np.arange(lam_m, dtype=np.int64))
        step = max(1, settings.ROW_CHUNK)
        for start in range(lo, hi + 1, step):
            stop = min(start + step, hi + 1)
            if lam_m == 0:
                seen[0] = True
                continue
            block = A.csr_rows(start, stop)
            if block.nnz != (stop - start) * lam_m:
                shape_ok = False
                break
            indices = np.asarray(block.indices, dtype=np.int64).reshape(stop - start, lam_m)
            shape_ok = shape_ok and bool(np.all(indices == columns[None, :]))
            positive = block.data.reshape(stop - start, lam_m) > 0
            seen[(positive * weights).sum(axis=1)] = True
            plus += positive.sum(axis=0)

        row_count = hi - lo + 1
        reports.append(BlockInvariantReport(
            block=m,
            lam=lam_m,
            alpha=alpha(m),
            rows_lo=lo,
            rows_hi=hi,
            row_count=row_count,
            column_count=len(columns),
            lambda_bounds=lambda_bounds,
            separated=separated,
            distinct_signs=shape_ok and bool(seen.all()),
            balanced=shape_ok and bool(np.all(2 * plus == row_count)),
        ))

    all_hold = all(report.holds for report in reports)
    logger.info(f"block invariants for {params!r}: {'hold' if all_hold else 'FAIL'}")
    return BlockInvariantsReport(params=params_schema(params), blocks=reports, all_hold=all_hold)


def binomial_exceedance(m: int, eps: float) -> float:
    """Pr(|2·Bin(λ_m, 1/2) - λ_m| > eps·m), computed exactly."""
    n = lam(m)
    threshold = Fraction(eps) * m
    count = 0
    coefficient = 1
    for j in range(n + 1):
        if abs(2 * j - n) > threshold:
            count += coefficient
        coefficient = coefficient * (n - j) // (j + 1)
    return float(Fraction(count, 2 ** n))


@timed
def verify_wlln_decay(
    A: CounterexampleMatrix,
    x: LazySequence,
    eps: float,
    threads: Optional[int] = None,
) -> WllnReport:
    """
    Fraction of rows n in R_m with |(Ax)_n| > eps, per block.

    For a constant sequence c the exact oracle is the binomial tail at eps/|c|.
    """
    if eps <= 0:
        raise ArgumentError(f"eps must be positive, got {eps}")
    params = A.params
    values = A.apply_prefix(x, params.last_row(), threads)
    constant = x.constant if isinstance(x, ConstantSequence) else None

    blocks: List[WllnBlockReport] = []
    for m in params.blocks():
        lo, hi = block_rows(m)
        fraction = float(np.count_nonzero(np.abs(values[lo: hi + 1]) > eps)) / (hi - lo + 1)
        oracle = None
        matches = None
        if constant is not None:
            oracle = binomial_exceedance(m, eps / abs(constant)) if constant != 0 else 0.0
            matches = abs(fraction - oracle) <= ORACLE_TOLERANCE
        blocks.append(WllnBlockReport(block=m, lam=lam(m), rows=hi - lo + 1, exceedance=fraction, oracle=oracle, matches=matches))

    tail = [b.exceedance for b in blocks if b.block >= 4]
    non_increasing = all(b <= a for a, b in zip(tail, tail[1:]))
    matches_oracle = None if constant is None else all(b.matches for b in blocks)
    return WllnReport(
        matrix=A.label,
        sequence=x.label,
        eps=eps,
        blocks=blocks,
        matches_oracle=matches_oracle,
        non_increasing_from_block_4=non_increasing,
    )


@timed
def density_of_R(max_m: int, params: Optional[CounterexampleParams] = None) -> DensityOfRReport:
    """Upper density of R = R_1 ∪ ... ∪ R_maxM with checkpoints forced at every max R_m."""
    if max_m < 3:
        raise ArgumentError(f"maxM must be at least 3, got {max_m}")
    if params is not None and max_m > params.max_block:
        raise ArgumentError(f"maxM {max_m} exceeds the construction's maxBlock {params.max_block}")
    R = RSet(max_m)
    max_n = block_rows(max_m)[1]
    plan = checkpoint_plan(max_n, R.boundaries(max_n))
    estimate = upper_density(R, LinearWeight(), max_n, checkpoints=plan)
    ratios = [(m, R.count_upto(block_rows(m)[1]) / block_rows(m)[1]) for m in range(1, max_m + 1)]
    exceeds = all(ratio > R_DENSITY_THRESHOLD for m, ratio in ratios if m >= 6)
    return DensityOfRReport(
        max_m=max_m,
        estimate=estimate,
        block_ratios=ratios,
        exceeds_threshold=exceeds,
        threshold=R_DENSITY_THRESHOLD,
    )


def detect_kappa(sums: np.ndarray, max_n: int, zero_tol: float, bins: int) -> Optional[float]:
    """
    A nonzero accumulation point of the row sums over I, or None.

    Histogram of the final-window rows over [0, max]; bin 0 never counts,
    ties go to the larger value and the winner is refined to the mean of
    its members. Points at or below zero_tol are treated as zero.
    """
    tail = sums[window_start(max_n): max_n + 1]
    if len(tail) == 0:
        return None
    top = float(tail.max())
    if top <= zero_tol:
        return None
    counts, edges = np.histogram(tail, bins=bins, range=(0.0, top))
    counts[0] = 0
    if counts.max() == 0:
        return None
    best = bins - 1 - int(np.argmax(counts[::-1]))
    upper = tail <= edges[best + 1] if best == bins - 1 else tail < edges[best + 1]
    members = tail[(tail >= edges[best]) & upper]
    kappa = float(members.mean())
    return kappa if kappa > zero_tol else None


def _row_profile(A: RowMatrix, n: int, I_enum: SetGen) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Columns in I, their ranks in I, and the entries of row n there."""
    cols, vals = A.row(n)
    keep = I_enum.contains_array(cols)
    cols, vals = cols[keep], vals[keep]
    if len(cols) == 0:
        return cols, cols, vals, vals
    ranks = I_enum.counts(int(cols.max()))[cols]
    return cols, ranks, np.abs(vals), vals


@timed
def construct_T3_witness(
    A: RowMatrix,
    I_enum: SetGen,
    max_n: Optional[int] = None,
    steps: Optional[int] = None,
    zero_tol: Optional[float] = None,
    bins: Optional[int] = None,
    threads: Optional[int] = None,
) -> WitnessTrace:
    """
    Greedy witness against T3 along a member I of the source ideal.

    With κ a nonzero accumulation point of r_n = Σ_{k∈I}|a_{n,k}| and
    S = {n : 7κ/8 < r_n < 9κ/8}, pick s_1 < s_2 < ... in S and
    m_0 = 1 < m_1 < ... with Σ_{j<=m_{n-1}}|a_{s_n,i_j}| <= κ/8 and
    Σ_{j<=m_n}|a_{s_n,i_j}| >= 7κ/8. The ±1 sequence x on I that copies the
    signs of row s_n on ranks (m_{n-1}, m_n] then has |(Ax)_{s_n}| > 3κ/8.
    """
    max_n = settings.WITNESS_MAX_N if max_n is None else resolve_max_n(max_n)
    steps = settings.WITNESS_STEPS if steps is None else int(steps)
    zero_tol = resolve_zero_tol(zero_tol)
    bins = settings.HISTOGRAM_BINS if bins is None else int(bins)

    t1 = check_T1(A, max_n, threads)
    if not t1.verdict.is_satisfied:
        logger.warning(f"witness for {A.label} built without a certified T1 ({t1.verdict.status.value})")

    sums = A.row_abs_sums(max_n, columns=I_enum, threads=threads)
    kappa = detect_kappa(sums, max_n, zero_tol, bins)
    if kappa is None:
        return WitnessTrace(
            matrix=A.label,
            i_set=I_enum.label,
            max_n=max_n,
            status=WitnessStatus.T3_HOLDS_AT_SCALE,
            verdict=Verdict.inconclusive("no nonzero accumulation point of the row sums over I: T3 holds at scale", bound=max_n),
        )

    s_set = np.nonzero((sums > 7 * kappa / 8) & (sums < 9 * kappa / 8))[0]
    s_set = s_set[s_set >= 1]

    recorded: List[Tuple[int, int, float, float, float]] = []
    plus_columns: List[int] = []
    m_prev = 1
    position = 0
    while len(recorded) < steps and position < len(s_set):
        s = int(s_set[position])
        position += 1
        cols, ranks, mags, vals = _row_profile(A, s, I_enum)
        head = ranks <= m_prev
        alpha_n = compensated_sum(mags[head].tolist())
        if alpha_n > kappa / 8:
            continue
        later = ~head
        cumulative = alpha_n + np.cumsum(mags[later])
        crossing = np.nonzero(cumulative >= 7 * kappa / 8)[0]
        if len(crossing) == 0:
            continue
        m_n = int(ranks[later][crossing[0]])
        middle = (ranks > m_prev) & (ranks <= m_n)
        beta_n = compensated_sum(mags[middle].tolist())
        gamma_n = compensated_sum(mags[ranks > m_n].tolist())
        plus_columns.extend(cols[middle & (vals > 0)].tolist())
        recorded.append((s, m_n, alpha_n, beta_n, gamma_n))
        m_prev = m_n

    x = SignSequence(I_enum, plus_columns, label=f"witness:{I_enum.label}")
    step_reports: List[WitnessStep] = []
    for index, (s, m_n, alpha_n, beta_n, gamma_n) in enumerate(recorded, start=1):
        ax = A.apply(x, s)
        total = alpha_n + beta_n + gamma_n
        inequalities = (
            alpha_n <= kappa / 8
            and alpha_n + beta_n >= 7 * kappa / 8
            and 7 * kappa / 8 < total < 9 * kappa / 8
        )
        step_reports.append(WitnessStep(
            index=index, s=s, m=m_n, alpha=alpha_n, beta=beta_n, gamma=gamma_n, ax=ax,
            inequalities_hold=inequalities, exceeds_three_eighths=abs(ax) > 3 * kappa / 8,
        ))

    failed = [step for step in step_reports if not (step.inequalities_hold and step.exceeds_three_eighths)]
    if failed:
        status = WitnessStatus.COMPLETE if len(step_reports) == steps else WitnessStatus.STALLED
        verdict = Verdict.violated(failed[0].s, f"step {failed[0].index} misses the 3κ/8 bound")
    elif len(step_reports) == steps:
        status = WitnessStatus.COMPLETE
        verdict = Verdict.satisfied(f"{steps} steps with |(Ax)_s| > 3κ/8, κ = {kappa:g}")
    else:
        status = WitnessStatus.STALLED
        verdict = Verdict.inconclusive(f"greedy selection stalled after {len(step_reports)} of {steps} steps", bound=max_n)

    logger.info(f"witness for {A.label} along {I_enum.label}: {status.value}, {len(step_reports)} steps")
    return WitnessTrace(
        matrix=A.label,
        i_set=I_enum.label,
        max_n=max_n,
        kappa=kappa,
        status=status,
        s_set_size=int(len(s_set)),
        s_set=s_set[:S_SET_SAMPLE].tolist(),
        steps=step_reports,
        plus_columns=sorted(plus_columns),
        verdict=verdict,
    )


def regularity_suite(i_set: SetGen) -> List[Tuple[LazySequence, float]]:
    """Bounded I-convergent samples: (1_I, 0), (1, 1) and (1 - 2·1_I, 1)."""
    indicator = IndicatorSequence(i_set)
    return [
        (indicator, 0.0),
        (ConstantSequence(1.0), 1.0),
        (AffineSequence(-2.0, 1.0, indicator), 1.0),
    ]


@timed
def run_counterexample(
    variant: str,
    params: CounterexampleParams,
    verify: bool = False,
    eps_grid: Optional[Sequence[float]] = None,
    wlln_eps: float = 0.25,
    zero_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> CounterexampleReport:
    """Build A or B and, with verify, run the checks the construction is meant to pass and fail."""
    variant = variant.upper()
    if variant not in ("A", "B"):
        raise ArgumentError(f"counterexample variant must be A or B, got {variant}")
    matrix = build_counterexample_A(params) if variant == "A" else build_counterexample_B(params)
    report = CounterexampleReport(
        variant=variant,
        params=params_schema(params),
        invariants=verify_block_invariants(params),
    )
    if not verify:
        return report

    max_n = params.last_row()
    z = IdealSpec.z()
    report.t1 = check_T1(matrix, max_n, threads)
    report.t2 = check_T2(matrix, z, max_n, eps_grid, zero_tol, threads)
    report.t3 = check_T3(matrix, params.i_set, z, z, max_n, eps_grid, zero_tol, threads)
    if params.max_block >= 3:
        report.density_of_r = density_of_R(params.max_block, params)
    report.wlln = verify_wlln_decay(build_counterexample_A(params), ConstantSequence(1.0), wlln_eps, threads)
    if variant == "B":
        report.regularity = check_regularity(
            matrix, z, z, regularity_suite(params.i_set), max_n, eps_grid,
            family=[params.i_set], zero_tol=zero_tol, threads=threads,
        )
    return report
