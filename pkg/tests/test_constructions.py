import numpy as np
import pytest

from app.core.errors import ArgumentError, ConstructionError
from app.models.counterexample import CounterexampleParams, RSet, alpha, block_rows, lam
from app.models.matrices import CesaroMatrix, IdentityMatrix, PickNthMatrix, SplitPairMatrix
from app.models.schemas import VerdictStatus, WitnessStatus
from app.models.sequences import AlternatingSequence, ConstantSequence
from app.models.sets import FiniteSet, RangeSet, squares
from app.services.construction_service import (
    binomial_exceedance,
    build_counterexample_A,
    build_counterexample_B,
    construct_T3_witness,
    density_of_R,
    detect_kappa,
    run_counterexample,
    verify_block_invariants,
    verify_wlln_decay,
)
from app.services.matrix_service import check_T1, check_T2, check_T3


def test_block_sizes():
    assert [lam(m) for m in range(1, 9)] == [0, 1, 3, 5, 7, 10, 13, 16]
    assert alpha(4) == 9
    assert block_rows(1) == (1, 1)
    assert block_rows(2) == (2, 3)
    assert block_rows(3) == (6, 13)
    assert block_rows(8) == (40320, 105855)


def test_params_validation():
    with pytest.raises(ArgumentError):
        CounterexampleParams(squares(), 1)
    with pytest.raises(ConstructionError):
        CounterexampleParams(FiniteSet([1, 2, 3]), 4)


def test_rows_copy_the_offset_bits(params6):
    A = build_counterexample_A(params6)
    assert params6.block_columns(3).tolist() == [4, 9, 16]
    cols, vals = A.row(6)
    assert cols.tolist() == [4, 9, 16]
    assert vals == pytest.approx([-1 / 3, -1 / 3, -1 / 3])
    cols, vals = A.row(7)
    assert vals == pytest.approx([1 / 3, -1 / 3, -1 / 3])
    assert len(A.row(1)[0]) == 0
    assert len(A.row(14)[0]) == 0


def test_streamed_rows_match_single_rows(params6):
    A = build_counterexample_A(params6)
    block = A.csr_rows(20, 60)
    for n in (24, 40, 55):
        start, stop = block.indptr[n - 20], block.indptr[n - 19]
        cols, vals = A.row(n)
        assert block.indices[start:stop].tolist() == cols.tolist()
        assert np.allclose(block.data[start:stop], vals)


def test_block_invariants_hold(params6):
    report = verify_block_invariants(params6)
    assert report.all_hold
    assert [b.block for b in report.blocks] == [1, 2, 3, 4, 5, 6]
    assert report.blocks[5].row_count == 1024


def test_binomial_exceedance_values():
    assert binomial_exceedance(4, 0.25) == pytest.approx(0.375)
    assert binomial_exceedance(5, 0.25) == pytest.approx(58 / 128)
    assert binomial_exceedance(1000, 0.25) < 0.05


def test_wlln_matches_the_binomial_oracle(params6):
    report = verify_wlln_decay(build_counterexample_A(params6), ConstantSequence(1.0), 0.25, threads=1)
    assert report.matches_oracle
    assert report.blocks[3].exceedance == pytest.approx(0.375)


def test_wlln_without_oracle(params6):
    report = verify_wlln_decay(build_counterexample_A(params6), AlternatingSequence(), 0.25, threads=1)
    assert report.matches_oracle is None
    with pytest.raises(ArgumentError):
        verify_wlln_decay(build_counterexample_A(params6), ConstantSequence(1.0), 0.0)


def test_density_of_r():
    report = density_of_R(3)
    assert report.block_ratios[2] == (3, pytest.approx(11 / 13))
    report = density_of_R(8)
    assert report.exceeds_threshold
    ratios = dict(report.block_ratios)
    assert ratios[6] == pytest.approx(1195 / 1743)
    assert ratios[8] == pytest.approx(74923 / 105855)
    with pytest.raises(ArgumentError):
        density_of_R(2)


def test_r_set_members():
    assert RSet(3).members(20).tolist() == [1, 2, 3, 6, 7, 8, 9, 10, 11, 12, 13]
    assert RSet(3).next_after(13) is None


def test_counterexample_b(params8, z):
    B = build_counterexample_B(params8)
    assert B.label == "counterexample-b:squares:8"
    cols, vals = B.row(40320)
    assert 40320 in cols.tolist()
    assert check_T1(B, params8.last_row(), threads=1).verdict.status == VerdictStatus.SATISFIED
    t3 = check_T3(B, squares(), z, z, params8.last_row(), threads=1)
    assert t3.verdict.status == VerdictStatus.VIOLATED


def test_counterexample_b_rows_carry_mass_on_the_squares(params8, z):
    B = build_counterexample_B(params8)
    sums = B.row_abs_sums(params8.last_row(), columns=squares(), threads=1)
    for m in range(3, 9):
        lo, hi = block_rows(m)
        assert sums[lo: hi + 1].min() >= 1 - 1e-12
    lo, hi = block_rows(2)
    assert sums[lo: hi + 1].tolist() == pytest.approx([0.5, 0.5])
    t2 = check_T2(B, z, params8.last_row(), threads=1)
    assert t2.verdict.status in (VerdictStatus.VIOLATED, VerdictStatus.INCONCLUSIVE)


def test_detect_kappa():
    sums = np.zeros(101)
    sums[50::2] = 0.5
    assert detect_kappa(sums, 100, 0.01, 64) == pytest.approx(0.5)
    assert detect_kappa(np.zeros(101), 100, 0.01, 64) is None


@pytest.mark.parametrize("matrix", [PickNthMatrix(squares()), SplitPairMatrix(squares())])
def test_witness_against_t3(matrix):
    trace = construct_T3_witness(matrix, squares(), threads=1)
    assert trace.status == WitnessStatus.COMPLETE
    assert trace.verdict.status == VerdictStatus.SATISFIED
    assert trace.kappa == pytest.approx(1.0)
    assert len(trace.steps) == 20
    assert all(step.exceeds_three_eighths for step in trace.steps)
    assert all(step.inequalities_hold for step in trace.steps)


def test_witness_when_rows_vanish_on_the_set():
    trace = construct_T3_witness(IdentityMatrix(), RangeSet(1, 5), threads=1)
    assert trace.status == WitnessStatus.T3_HOLDS_AT_SCALE
    assert trace.verdict.status == VerdictStatus.INCONCLUSIVE


def test_witness_on_cesaro_finds_no_accumulation_point():
    trace = construct_T3_witness(CesaroMatrix(), squares(), max_n=100000, threads=1)
    assert trace.status == WitnessStatus.T3_HOLDS_AT_SCALE
    assert trace.verdict.status == VerdictStatus.INCONCLUSIVE
    assert trace.kappa is None


def test_run_counterexample(params6):
    report = run_counterexample("b", params6)
    assert report.variant == "B"
    assert report.invariants.all_hold
    assert report.t1 is None
    with pytest.raises(ArgumentError):
        run_counterexample("C", params6)
