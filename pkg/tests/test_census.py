from fractions import Fraction

import pytest

from collatz_probe.census import (
    CensusReport,
    IncompleteViolatorList,
    census,
    census_range,
    classify_trend,
    lift_analysis,
    merge_census_partials,
    reverify,
    trend,
    violator_counts,
)
from collatz_probe.core import StepLimitExceeded
from collatz_probe.sieve import build_sieve
from oracles import LIFT_COUNTS, X_SEQUENCE, naive_violators


@pytest.mark.parametrize(
    "K, violators",
    [(1, ()), (2, (3,)), (3, (3, 7)), (4, (7, 11, 15)), (5, (7, 15, 27, 31))],
)
def test_census_examples(K, violators):
    rep = census(K)
    assert rep.violators_sample == violators
    assert rep.x == len(violators)
    assert rep.population == 2**K - 2
    assert rep.premise_holds == (K == 1)


@pytest.mark.parametrize("K", range(1, 13))
def test_census_matches_oracle(K):
    rep = census(K)
    assert list(rep.violators_sample) == naive_violators(K)
    assert rep.x == X_SEQUENCE[K - 1]
    assert reverify(rep) == []


@pytest.mark.parametrize("K", range(2, 15))
def test_sieve_accelerated_census_is_identical(K):
    plain = census(K)
    for bits in {1, 2, K // 2, K}:
        assert census(K, build_sieve(bits)) == plain


def test_sieve_bits_above_level_rejected():
    with pytest.raises(ValueError):
        census(4, build_sieve(5))


@pytest.mark.parametrize("K", [0, 31])
def test_level_bounds(K):
    with pytest.raises(ValueError):
        census(K)


def test_monotone_membership():
    reps = {K: set(census(K).violators_sample) for K in range(2, 15)}
    for K in range(3, 15):
        low = {v for v in reps[K] if v < 2 ** (K - 1)}
        assert low <= reps[K - 1]


def test_step_limit_error_names_the_start():
    with pytest.raises(StepLimitExceeded) as info:
        census(5, step_limit=20)
    assert info.value.n < 32


def test_partition_independence():
    K = 12
    whole = census_range(2, 2**K, K)
    cuts = [2, 17, 1000, 1001, 3000, 2**K]
    merged = None
    for lo, hi in zip(cuts, cuts[1:]):
        part = census_range(lo, hi, K)
        merged = part if merged is None else merge_census_partials(merged, part)
    assert merged == whole


def test_sampled_mode_is_partition_independent():
    K = 12
    whole = census_range(2, 2**K, K, full_list=False)
    a = census_range(2, 1500, K, full_list=False)
    b = census_range(1500, 2**K, K, full_list=False)
    assert merge_census_partials(b, a, full_list=False) == whole
    assert whole["x"] == X_SEQUENCE[K - 1]


def test_lift_k3():
    rep = lift_analysis(3, census(3), census(4))
    assert rep.lifted == (11, 15)
    assert rep.became_compliant == 0
    assert rep.lift_fraction == 0
    assert rep.carry_violations == ()
    assert rep.carried_candidates == 3


def test_lift_k4():
    rep = lift_analysis(4, census(4), census(5))
    assert rep.lifted == (23, 27, 31)
    assert rep.became_compliant == 1
    assert rep.lift_fraction == Fraction(1, 3)
    assert rep.carry_violations == ()


def test_lift_k1_has_empty_candidates():
    rep = lift_analysis(1, census(1), census(2))
    assert rep.lifted == ()
    assert rep.lift_fraction == 0
    # 3 = 1 + 2 comes from the excluded start 1, so it shows up as a finding
    assert rep.carry_violations == (3,)


@pytest.mark.parametrize("k, x_k, became", LIFT_COUNTS[:10])
def test_lift_counts_match_oracle(k, x_k, became):
    rep = lift_analysis(k, census(k), census(k + 1))
    assert len(rep.lifted) == x_k
    assert rep.became_compliant == became
    assert rep.carry_violations == ()


def test_lift_needs_consecutive_levels():
    with pytest.raises(ValueError):
        lift_analysis(3, census(3), census(5))


def test_lift_needs_full_lists():
    sampled = CensusReport(4, 14, 3, (7,), 7, violators_complete=False)
    with pytest.raises(IncompleteViolatorList):
        lift_analysis(4, sampled, census(5))


def test_trend_examples():
    assert trend(5).x_sequence == (0, 1, 2, 3, 4)
    t1 = trend(1)
    assert t1.x_sequence == (0,)
    assert t1.growth_ratios == ()


def test_trend_matches_direct_census():
    t = trend(14)
    assert t.x_sequence == X_SEQUENCE[:14]
    assert t.x_sequence == tuple(census(K).x for K in range(1, 15))
    assert [K for K, _ in t.growth_ratios] == list(range(2, 14))
    assert not t.tier1


def test_trend_with_sieve_is_identical():
    assert violator_counts(14, build_sieve(10)) == violator_counts(14)


def test_tier_classification():
    assert classify_trend([0, 1, 0]).tier1
    t = classify_trend([1, 9, 8, 7, 6, 5], window=4)
    assert t.tier2 and not t.tier1
    # x still growing, but the growth ratio keeps falling
    g = classify_trend([1, 8, 32, 96, 240, 480], window=4)
    assert g.tier3 and not g.tier2
    assert g.tier == 3
    assert classify_trend([1, 2, 4, 8, 16, 32]).tier == 0
