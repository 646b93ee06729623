import numpy as np
import pytest

from app.core.errors import ArgumentError, DomainError, RangeError
from app.models.ideals import IdealSpec
from app.models.schemas import EstimateMode, VerdictStatus
from app.models.sets import (
    Complement,
    EmptySet,
    FactorialBlocks,
    FiniteSet,
    RangeSet,
    Union,
    evens,
    integer_root,
    odds,
    squares,
)
from app.models.weights import LinearWeight, PiecewiseWeight, TableWeight
from app.services.density_service import (
    assess_membership,
    in_ideal,
    uniform_density_zero_test,
    uniform_window_plan,
    upper_densities,
    upper_density,
)
from app.utils.checkpoints import (
    DECAYING,
    INCREASING,
    PINNED,
    checkpoint_plan,
    classify_trend,
    geometric_checkpoints,
    normalize_plan,
)

MAX_N = 100000


# Sets
def test_finite_set_is_sorted_and_deduplicated():
    S = FiniteSet([9, 1, 4, 4])
    assert S.values.tolist() == [1, 4, 9]
    assert S.label == "finite:1,4,9"
    assert S.next_after(4) == 9
    assert S.next_after(9) is None


def test_finite_set_rejects_nonpositive_members():
    with pytest.raises(ArgumentError):
        FiniteSet([0, 3])


def test_counts_are_exact():
    counts = squares().counts(100)
    assert counts[0] == 0
    assert counts[99] == 9
    assert counts[100] == 10


def test_integer_root_is_exact_next_to_perfect_powers():
    roots = integer_root(np.array([10 ** 12, 10 ** 12 - 1, 26, 27]), 2)
    assert roots.tolist() == [10 ** 6, 10 ** 6 - 1, 5, 5]
    assert integer_root(np.array([26, 27, 64]), 3).tolist() == [2, 3, 4]


def test_structured_membership_beyond_the_prefix():
    S = squares()
    assert S.contains_array([10 ** 12, 10 ** 12 + 1]).tolist() == [True, False]
    assert evens().contains(2 * 10 ** 10)
    assert not odds().contains(2 * 10 ** 10)


def test_complement_and_union():
    S = Union(FiniteSet([3]), RangeSet(5, 6))
    assert S.members(10).tolist() == [3, 5, 6]
    assert Complement(S).members(7).tolist() == [1, 2, 4, 7]
    assert S.declared_infinite is False


def test_factorial_blocks_layout():
    S = FactorialBlocks()
    assert FactorialBlocks.blocks_upto(MAX_N) == [(24, 119), (40320, 362879)]
    assert S.boundaries(MAX_N) == [23, 119, 40319, MAX_N]
    assert S.count_upto(119) == 96
    assert S.next_after(119) == 40320


# Checkpoints
def test_geometric_checkpoints_end_at_max_n():
    plan = geometric_checkpoints(100)
    assert plan[0] == 1
    assert plan[-1] == 100
    assert np.all(np.diff(plan) > 0)


def test_geometric_checkpoints_reject_bad_ratio():
    with pytest.raises(ArgumentError):
        geometric_checkpoints(100, ratio=1.0)


def test_checkpoint_plan_includes_boundaries():
    plan = checkpoint_plan(1000, [777, 5000])
    assert 777 in plan
    assert 5000 not in plan


def test_normalize_plan_needs_a_point_in_range():
    with pytest.raises(ArgumentError):
        normalize_plan([0, 2000], 1000)


def test_classify_trend():
    ns = np.array([10, 20, 30, 40])
    assert classify_trend(ns, np.array([0.1, 0.1, 0.5, 0.5]), 10, 40)[2] == INCREASING
    assert classify_trend(ns, np.array([0.5, 0.5, 0.1, 0.1]), 10, 40)[2] == DECAYING
    assert classify_trend(ns, np.array([0.3, 0.3, 0.3, 0.3]), 10, 40)[2] == PINNED


def test_rise_below_noise_floor_is_not_increasing():
    ns = np.array([10, 20, 30, 40])
    ratios = np.array([0.0001, 0.0001, 0.0005, 0.0005])
    assert classify_trend(ns, ratios, 10, 40, zero_tol=0.01)[2] != INCREASING


# Estimates
def test_upper_density_of_evens():
    estimate = upper_density(evens(), max_n=MAX_N)
    assert estimate.value == pytest.approx(0.5)
    assert estimate.mode == EstimateMode.TAIL_MAX
    assert estimate.window_start == 25000


def test_running_max_mode():
    estimate = upper_density(evens(), max_n=1000, mode=EstimateMode.RUNNING_MAX)
    assert estimate.value == pytest.approx(0.5)


def test_explicit_checkpoints():
    estimate = upper_density(evens(), max_n=100, checkpoints=[50, 100, 10 ** 9])
    assert [n for n, _ in estimate.checkpoints] == [50, 100]
    assert estimate.value == pytest.approx(0.5)


def test_empty_set_has_density_zero(z):
    estimate, verdict = assess_membership(EmptySet(), z, 1000)
    assert estimate.value == 0.0
    assert verdict.status == VerdictStatus.SATISFIED


def test_weight_must_be_positive():
    with pytest.raises(DomainError):
        upper_density(evens(), TableWeight(np.array([1.0, 0.0, 3.0]), "table:bad"), max_n=3)


def test_table_weight_range():
    with pytest.raises(RangeError):
        upper_density(evens(), TableWeight(np.arange(1, 11, dtype=float), "table:ten"), max_n=100)


def test_simple_density_weight_must_grow():
    flat = TableWeight(np.ones(1000), "table:flat")
    with pytest.raises(DomainError):
        in_ideal(evens(), IdealSpec.zg(flat), 1000)


def test_zero_tol_must_be_positive(z):
    with pytest.raises(ArgumentError):
        in_ideal(evens(), z, 1000, zero_tol=0.0)


# Ideal membership
def test_evens_not_in_z(z):
    verdict = in_ideal(evens(), z, MAX_N)
    assert verdict.status == VerdictStatus.VIOLATED
    assert verdict.witness >= 25000


def test_squares_in_z(z):
    assert in_ideal(squares(), z, MAX_N).status == VerdictStatus.SATISFIED


def test_fin_membership(fin):
    assert in_ideal(squares(), fin, 1000).status == VerdictStatus.VIOLATED
    assert in_ideal(FiniteSet([1, 2, 3]), fin, 1000).status == VerdictStatus.SATISFIED
    assert in_ideal(FiniteSet([1, 2, 3000]), fin, 1000).status == VerdictStatus.INCONCLUSIVE


def test_factorial_blocks_separate_z_from_zg(z):
    zg = IdealSpec.zg(PiecewiseWeight())
    estimate, verdict = assess_membership(FactorialBlocks(), zg, MAX_N)
    assert verdict.status == VerdictStatus.SATISFIED
    assert estimate.value < 0.004

    estimate, verdict = assess_membership(FactorialBlocks(), z, MAX_N)
    assert verdict.status == VerdictStatus.VIOLATED
    assert estimate.value == pytest.approx(59777 / MAX_N)


def test_factorial_blocks_not_uniformly_null():
    verdict = in_ideal(FactorialBlocks(), IdealSpec.uniform(), MAX_N)
    assert verdict.status == VerdictStatus.VIOLATED


def test_uniform_window_plan():
    assert uniform_window_plan(64) == [1, 2, 4, 8, 16]
    assert uniform_window_plan(3) == [1]


def test_uniform_density_of_evens():
    estimate = uniform_density_zero_test(evens(), 1000, [1, 2, 10, 100])
    assert estimate.mode == EstimateMode.UNIFORM_WINDOW
    assert estimate.checkpoints[0] == (1, 1.0)
    assert estimate.value == pytest.approx(0.5)


def test_uniform_density_rejects_bad_windows():
    with pytest.raises(ArgumentError):
        uniform_density_zero_test(evens(), 100, [])
    with pytest.raises(ArgumentError):
        uniform_density_zero_test(evens(), 100, [200])


def test_linear_weight_slot_zero():
    assert LinearWeight().values(5).tolist() == [1.0, 1.0, 2.0, 3.0, 4.0, 5.0]


def test_shared_plan_keeps_inclusion_order():
    max_n = 500000
    blocks = FactorialBlocks()
    # Same members plus 1, but a finite set declares no block ends.
    wider = FiniteSet(np.append(blocks.members(max_n), 1), label="blocks-and-one")
    narrow, wide = upper_densities([blocks, wider], max_n=max_n)
    assert [n for n, _ in narrow.checkpoints] == [n for n, _ in wide.checkpoints]
    assert 362879 in dict(wide.checkpoints)
    assert narrow.value <= wide.value
    assert wide.value >= upper_density(blocks, max_n=max_n).value


def test_upper_densities_needs_a_set():
    with pytest.raises(ArgumentError):
        upper_densities([])
