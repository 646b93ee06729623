import numpy as np
import pytest

from app.core.errors import ArgumentError, PreconditionError
from app.models.schemas import VerdictStatus
from app.models.sequences import AlternatingSequence, ArraySequence, ConstantSequence, SquaresDiagonalSequence
from app.models.sets import evens, squares
from app.services.multiplier_service import corollary_inclusion_suite, diagonal_unbounded_probe, multiplier_check

MAX_N = 100000


@pytest.mark.parametrize("s", [ConstantSequence(1.0), AlternatingSequence()])
def test_bounded_sequences_are_multipliers_on_squares(s, z):
    report = multiplier_check(s, [squares()], z, MAX_N, threads=1)
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert report.consistent
    assert report.sup_abs == 1.0
    assert report.matrix_verdict.status == VerdictStatus.SATISFIED


def test_unbounded_data_is_rejected(z):
    s = ArraySequence(np.array([0.5, 2.0]), "data", declared_bound=1.0, one_based=False)
    report = multiplier_check(s, [squares()], z, 2)
    assert report.verdict.status == VerdictStatus.VIOLATED
    assert report.bound_error
    assert report.sup_index == 2
    assert report.sup_abs == 2.0


def test_multiplier_needs_a_family(z):
    with pytest.raises(ArgumentError):
        multiplier_check(ConstantSequence(1.0), [], z, 1000)


def test_inclusion_suite(z):
    report = corollary_inclusion_suite([squares()], z, [ConstantSequence(1.0), AlternatingSequence()], MAX_N, threads=1)
    assert report.verdict.status == VerdictStatus.SATISFIED
    assert len(report.samples) == 2


def test_inclusion_suite_checks_its_precondition(z):
    with pytest.raises(PreconditionError):
        corollary_inclusion_suite([evens()], z, [ConstantSequence(1.0)], 10000)


def test_unbounded_diagonal_still_z_converges():
    report = diagonal_unbounded_probe(SquaresDiagonalSequence(squares()), squares(), 1000000, threads=1)
    assert report.unbounded
    assert report.sup_index == 1000000
    assert report.sup_value == 1000000.0
    assert report.image_limit.verdict.status == VerdictStatus.SATISFIED


def test_constant_is_no_multiplier_on_evens(z):
    report = multiplier_check(ConstantSequence(1.0), [evens()], z, MAX_N, threads=1)
    assert report.verdict.status == VerdictStatus.VIOLATED
    assert report.matrix_verdict.status == VerdictStatus.VIOLATED
    assert report.consistent


def test_unbounded_diagonal_is_no_multiplier(z):
    report = multiplier_check(SquaresDiagonalSequence(squares()), [squares()], z, 1000000, threads=1)
    assert report.verdict.status == VerdictStatus.VIOLATED
    assert report.bound_error
    assert report.t1.verdict.status == VerdictStatus.VIOLATED
    assert report.sup_abs == 1000000.0
