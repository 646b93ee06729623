import numpy as np
import pytest

from app.core.errors import ConstructionError, NonnegativityError, SuiteError
from app.models.matrices import (
    CesaroMatrix,
    DiagonalMatrix,
    ExplicitMatrix,
    IdentityMatrix,
    PermutationMatrix,
    PickNthMatrix,
    SplitPairMatrix,
    SumMatrix,
)
from app.models.permutations import PairSwap
from app.models.schemas import VerdictStatus
from app.models.sequences import AlternatingSequence, ConstantSequence, IndicatorSequence, SquaresDiagonalSequence
from app.models.sets import Complement, all_integers, evens, squares
from app.services.construction_service import regularity_suite
from app.services.matrix_service import (
    apply,
    check_c0_mapping,
    check_regularity,
    check_S1,
    check_S2,
    check_S3,
    check_sliding,
    check_T1,
    check_T2,
    check_T3,
    check_T4,
)

MAX_N = 100000
COARSE_GRID = [0.5, 0.1]


@pytest.fixture(scope="module")
def cesaro():
    return CesaroMatrix()


def test_cesaro_rows(cesaro):
    cols, vals = cesaro.row(4)
    assert cols.tolist() == [1, 2, 3, 4]
    assert vals.tolist() == [0.25] * 4
    assert apply(cesaro, IndicatorSequence(squares()), 4) == pytest.approx(0.5)


def test_cesaro_closed_forms_match_streamed_rows(cesaro):
    block = cesaro.csr(200)
    streamed = np.asarray(block.sum(axis=1)).ravel()
    assert np.allclose(streamed[1:], cesaro.row_sums(200)[1:])
    counted = cesaro.row_sums(200, columns=squares())
    assert counted[100] == pytest.approx(0.1)


def test_cesaro_is_classically_regular(cesaro):
    assert check_S1(cesaro, MAX_N).verdict.status == VerdictStatus.SATISFIED
    assert check_S2(cesaro, MAX_N).verdict.status == VerdictStatus.SATISFIED
    s3 = check_S3(cesaro, max_n=MAX_N)
    assert s3.verdict.status == VerdictStatus.SATISFIED
    assert [part.condition for part in s3.parts] == ["S3:1", "S3:2", "S3:3", "S3:4", "S3:5"]


def test_cesaro_t3_on_squares(cesaro, z):
    report = check_T3(cesaro, squares(), z, z, MAX_N, COARSE_GRID)
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert report.warnings == []


def test_t3_warns_when_the_set_is_not_in_the_ideal(cesaro, z):
    from app.models.sets import evens

    report = check_T3(cesaro, evens(), z, z, 10000, COARSE_GRID)
    assert report.warnings
    assert report.verdict.status == VerdictStatus.VIOLATED


def test_sliding_condition(cesaro):
    report = check_sliding(cesaro, [1, 10], MAX_N, COARSE_GRID)
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert len(report.parts) == 2


def test_t4_rejects_negative_entries(z):
    with pytest.raises(NonnegativityError) as info:
        check_T4(SplitPairMatrix(squares()), Complement(squares()), z, z, 100)
    assert (info.value.row, info.value.column) == (1, 4)


def test_t4_identity_on_all_integers(z):
    report = check_T4(IdentityMatrix(), all_integers(), z, z, 10000)
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert report.warnings == []


def test_t4_cesaro_on_evens_is_violated(cesaro, z):
    report = check_T4(cesaro, evens(), z, z, 10000)
    assert report.verdict.status == VerdictStatus.VIOLATED
    assert report.warnings


def test_t4_cesaro_off_the_squares(cesaro, z):
    # Row n misses 1 by floor(sqrt(n)) / n; rows off by more than 0.02 end at 2500.
    report = check_T4(cesaro, Complement(squares()), z, z, 2000000)
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert report.condition == "T4"


def test_identity_and_permutation_matrices(z):
    assert check_T1(IdentityMatrix(), 1000).verdict.status == VerdictStatus.SATISFIED
    assert check_T2(IdentityMatrix(), z, 1000).verdict.status == VerdictStatus.SATISFIED
    cols, vals = PermutationMatrix(PairSwap()).row(1)
    assert cols.tolist() == [2]
    assert vals.tolist() == [1.0]


def test_pick_nth_and_split_pair_rows():
    assert PickNthMatrix(squares()).row(3)[0].tolist() == [9]
    cols, vals = SplitPairMatrix(squares()).row(2)
    assert cols.tolist() == [9, 16]
    assert vals.tolist() == [0.5, -0.5]
    block = SplitPairMatrix(squares()).csr_rows(2, 4)
    assert block.indices.tolist() == [9, 16, 25, 36]


def test_sum_matrix_drops_cancelled_entries():
    total = SumMatrix(IdentityMatrix(), DiagonalMatrix(ConstantSequence(-1.0)))
    cols, _ = total.row(5)
    assert len(cols) == 0
    assert total.csr_rows(1, 10).nnz == 0


def test_explicit_matrix_validation():
    A = ExplicitMatrix({2: ([1, 3], [0.5, 0.0])}, "small")
    cols, vals = A.row(2)
    assert cols.tolist() == [1]
    assert vals.tolist() == [0.5]
    assert len(A.row(1)[0]) == 0
    with pytest.raises(ConstructionError):
        ExplicitMatrix({1: ([3, 1], [1.0, 1.0])}, "unsorted")


def test_unbounded_diagonal_is_undecided_at_small_scale():
    report = check_T1(DiagonalMatrix(SquaresDiagonalSequence(squares())), 10000)
    assert report.verdict.status == VerdictStatus.INCONCLUSIVE
    assert report.trace.value == 10000.0


def test_c0_mapping(cesaro, z):
    report = check_c0_mapping(cesaro, z, z, [IndicatorSequence(squares())], MAX_N, COARSE_GRID)
    assert report.verdict.status == VerdictStatus.SATISFIED


def test_c0_mapping_needs_null_samples(cesaro, z):
    with pytest.raises(SuiteError):
        check_c0_mapping(cesaro, z, z, [AlternatingSequence()], 1000, COARSE_GRID)


def test_cesaro_regularity(cesaro, z):
    report = check_regularity(
        cesaro, z, z, regularity_suite(squares()), MAX_N, COARSE_GRID, family=[squares()]
    )
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert report.consistent
    assert len(report.pairs) == 3
    assert report.t3[0].verdict.status == VerdictStatus.SATISFIED
