import math

import numpy as np
from hypothesis import given, settings, strategies as st

from app.models.permutations import BlockReverse, BlockSwap, PairSwap, SquaresEvens
from app.models.sets import FiniteSet, Union, integer_root
from app.services.density_service import upper_densities, upper_density
from app.services.permutation_service import escaper_counts
from app.utils.summation import compensated_cumsum, segmented_compensated_sum

PROPERTY_SETTINGS = settings(max_examples=50, deadline=None)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@PROPERTY_SETTINGS
@given(st.lists(finite_floats, min_size=1, max_size=60), st.lists(st.integers(0, 60), max_size=5))
def test_segmented_sum_matches_fsum(values, cuts):
    data = np.array(values)
    offsets = np.array(sorted({0, len(values), *(min(c, len(values)) for c in cuts)}))
    sums = segmented_compensated_sum(data, offsets)
    for i, total in enumerate(sums):
        expected = math.fsum(values[offsets[i]: offsets[i + 1]])
        assert math.isclose(total, expected, rel_tol=1e-12, abs_tol=1e-6)


@PROPERTY_SETTINGS
@given(st.lists(finite_floats, min_size=1, max_size=400))
def test_cumsum_matches_fsum_prefixes(values):
    prefixes = compensated_cumsum(np.array(values))
    assert len(prefixes) == len(values)
    for n, total in enumerate(prefixes, start=1):
        assert math.isclose(total, math.fsum(values[:n]), rel_tol=1e-12, abs_tol=1e-6)


@PROPERTY_SETTINGS
@given(st.sets(st.integers(1, 500), max_size=40), st.integers(1, 600))
def test_finite_set_counts(members, n):
    if not members:
        return
    S = FiniteSet(sorted(members))
    counts = S.counts(n)
    assert counts[n] == sum(1 for k in members if k <= n)
    assert S.members(n).tolist() == sorted(k for k in members if k <= n)


@PROPERTY_SETTINGS
@given(st.sampled_from([PairSwap(), BlockSwap(), BlockReverse(), SquaresEvens()]), st.integers(1, 100000))
def test_permutations_round_trip(sigma, n):
    assert sigma.inverse(sigma.forward(n)) == n
    assert sigma.forward(sigma.inverse(n)) == n


@PROPERTY_SETTINGS
@given(st.sampled_from([PairSwap(), BlockSwap(), BlockReverse(), SquaresEvens()]), st.integers(1, 300))
def test_escapers_match_brute_force(sigma, n):
    counts = escaper_counts(sigma, n)
    assert counts[n] == sum(1 for k in range(1, n + 1) if sigma.forward(k) > n)


@PROPERTY_SETTINGS
@given(st.integers(1, 10 ** 15), st.sampled_from([2, 3]))
def test_integer_root_is_exact(n, k):
    root = int(integer_root(np.array([n]), k)[0])
    assert root ** k <= n < (root + 1) ** k


DENSITY_MAX_N = 10000
random_sets = st.sets(st.integers(1, DENSITY_MAX_N), min_size=1, max_size=300).map(lambda s: FiniteSet(sorted(s)))


@PROPERTY_SETTINGS
@given(random_sets)
def test_tail_max_matches_brute_force(S):
    members = S.members(DENSITY_MAX_N).tolist()
    estimate = upper_density(S, max_n=DENSITY_MAX_N)
    brute = {n: sum(1 for k in members if k <= n) / n for n, _ in estimate.checkpoints}
    assert all(ratio == brute[n] for n, ratio in estimate.checkpoints)
    assert estimate.value == max(brute[n] for n in brute if n >= estimate.window_start)


@PROPERTY_SETTINGS
@given(random_sets, random_sets)
def test_upper_density_is_monotone_and_subadditive(A, B):
    union, a, b = (e.value for e in upper_densities([Union(A, B), A, B], max_n=DENSITY_MAX_N))
    assert max(a, b) <= union
    assert union <= a + b + 1e-12
