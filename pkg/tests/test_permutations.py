import numpy as np
import pytest

from app.core.errors import ArgumentError, InputFileError, RangeError
from app.models.permutations import (
    BlockReverse,
    BlockSwap,
    ExplicitPermutation,
    IdentityPermutation,
    PairSwap,
    SquaresEvens,
)
from app.models.schemas import VerdictStatus
from app.models.sets import evens, squares
from app.models.weights import LinearWeight, PowerWeight, TableWeight
from app.services.permutation_service import (
    check_growth_condition,
    check_P3,
    check_P4_zero_limit_point,
    escaper_counts,
    image_set,
    levy_group_test,
    permutation_regularity,
    sigma_hat,
)

MAX_N = 100000


def test_block_swap_layout():
    sigma = BlockSwap()
    assert sigma.forward_array(np.arange(1, 16)).tolist() == [2, 1, 3, 8, 9, 10, 11, 4, 5, 6, 7, 12, 13, 14, 15]


def test_block_reverse():
    sigma = BlockReverse()
    assert sigma.forward_array(np.arange(4, 8)).tolist() == [7, 6, 5, 4]
    ns = np.arange(1, 1000)
    assert np.array_equal(sigma.forward_array(sigma.forward_array(ns)), ns)


def test_squares_evens_is_a_bijection():
    sigma = SquaresEvens()
    ns = np.arange(1, 5001)
    images = sigma.forward_array(ns)
    assert len(np.unique(images)) == len(ns)
    assert np.array_equal(sigma.forward_array(sigma.inverse_array(ns)), ns)
    assert sigma.forward(9) == 6
    assert sigma.forward(2) == 1
    assert sigma.inverse(5) == 5
    assert sigma.inverse(6) == 9


def test_sigma_hat():
    assert sigma_hat(SquaresEvens(), 2) == 2.0
    assert sigma_hat(SquaresEvens(), 8) == 0.5
    assert sigma_hat(IdentityPermutation(), 7) == 1.0
    with pytest.raises(ArgumentError):
        sigma_hat(IdentityPermutation(), 0)


def test_escaper_counts():
    assert escaper_counts(IdentityPermutation(), 10).tolist() == [0] * 11
    assert escaper_counts(PairSwap(), 6).tolist() == [0, 1, 0, 1, 0, 1, 0]
    assert escaper_counts(BlockSwap(), 15)[7] == 4


def test_explicit_permutation():
    sigma = ExplicitPermutation(np.array([3, 1, 2]), "small")
    assert sigma.forward(1) == 3
    assert sigma.inverse(3) == 1
    with pytest.raises(RangeError):
        sigma.forward(4)
    with pytest.raises(InputFileError):
        ExplicitPermutation(np.array([1, 1, 2]), "repeated")
    with pytest.raises(InputFileError):
        ExplicitPermutation(np.array([1, 4]), "outside")


def test_levy_group():
    assert levy_group_test(IdentityPermutation(), MAX_N, threads=1).verdict.status == VerdictStatus.SATISFIED
    report = levy_group_test(PairSwap(), MAX_N, threads=1)
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert report.companion.verdict.status == VerdictStatus.SATISFIED


def test_block_swap_leaves_the_levy_group():
    report = levy_group_test(BlockSwap(), 2 ** 21, with_companion=False, threads=1)
    assert report.verdict.status == VerdictStatus.VIOLATED
    assert report.companion is None
    assert report.estimate.value == pytest.approx(0.5, abs=1e-3)


def test_image_set():
    image = image_set(SquaresEvens(), squares(), 100)
    assert image.members(10).tolist() == [2, 4, 6, 8, 10]


def test_p3(z):
    assert check_P3(SquaresEvens(), squares(), z, MAX_N).verdict.status == VerdictStatus.VIOLATED
    assert check_P3(PairSwap(), squares(), z, MAX_N).verdict.status == VerdictStatus.SATISFIED


@pytest.mark.parametrize(
    "sigma,expected",
    [
        (IdentityPermutation(), VerdictStatus.SATISFIED),
        (PairSwap(), VerdictStatus.SATISFIED),
        (BlockSwap(), VerdictStatus.SATISFIED),
        (BlockReverse(), VerdictStatus.SATISFIED),
        (SquaresEvens(), VerdictStatus.VIOLATED),
    ],
)
def test_p4_zero_limit_point(sigma, expected):
    report = check_P4_zero_limit_point(sigma, LinearWeight(), MAX_N, threads=1)
    assert report.verdict.status == expected
    assert [item.eps for item in report.per_eps] == [0.5, 0.2, 0.1, 0.05]


def test_growth_condition():
    report = check_growth_condition(LinearWeight(), LinearWeight(), [2.0, 3.0], 10000)
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert [trace.alpha for trace in report.traces] == [2.0, 3.0]
    with pytest.raises(ArgumentError):
        check_growth_condition(LinearWeight(), LinearWeight(), [1.0], 1000)
    with pytest.raises(RangeError):
        check_growth_condition(TableWeight(np.arange(1, 1001, dtype=float), "table:n"), LinearWeight(), [2.0], 1000)


def test_growth_condition_fails_for_a_fast_weight():
    report = check_growth_condition(PowerWeight(2), LinearWeight(), [2.0], 10000)
    assert report.verdict.status != VerdictStatus.SATISFIED


@pytest.mark.parametrize("sigma", [IdentityPermutation(), PairSwap(), BlockSwap(), BlockReverse(), SquaresEvens()])
def test_p3_and_t3_agree(sigma, z):
    report = permutation_regularity(sigma, z, z, [squares(), evens()], MAX_N, threads=1)
    assert report.consistent
    assert report.disagreements == []
    for p3, t3 in zip(report.p3, report.t3):
        if p3.verdict.status != VerdictStatus.INCONCLUSIVE and t3.verdict.status != VerdictStatus.INCONCLUSIVE:
            assert p3.verdict.status == t3.verdict.status


def test_permutation_regularity_needs_a_family(z):
    with pytest.raises(ArgumentError):
        permutation_regularity(PairSwap(), z, z, [], 1000)
