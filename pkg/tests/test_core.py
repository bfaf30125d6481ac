import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collatz_probe.core import (
    LOG2_OVER_LOG3,
    StepLimitExceeded,
    collatz_step,
    flight_profile,
    needs_bignum,
    odd_even_bound_holds,
    oe_ratio,
    render_fraction,
    stopping_profile,
)
from oracles import naive_flight, naive_stop


@pytest.mark.parametrize("x, expected", [(1, 4), (6, 3), (3, 10), (10, 5), (5, 16)])
def test_collatz_step(x, expected):
    assert collatz_step(x) == expected


def test_collatz_step_rejects_zero():
    with pytest.raises(ValueError):
        collatz_step(0)


@pytest.mark.parametrize(
    "n, m, m1, m2, landing",
    [
        (11, 8, 3, 5, 10),
        (6, 1, 0, 1, 3),
        (7, 11, 4, 7, 5),
        (3, 6, 2, 4, 2),
    ],
)
def test_stopping_profile_examples(n, m, m1, m2, landing):
    p = stopping_profile(n)
    assert (p.m, p.m1, p.m2, p.landing, p.defined) == (m, m1, m2, landing, True)


def test_stopping_time_of_27():
    assert stopping_profile(27).m == 96
    assert stopping_profile(27).m == naive_stop(27)[0]


def test_stopping_profile_of_one_is_undefined():
    p = stopping_profile(1)
    assert not p.defined
    assert p.landing is None


def test_step_limit_carries_partial_profile():
    with pytest.raises(StepLimitExceeded) as info:
        stopping_profile(27, step_limit=10)
    err = info.value
    assert err.n == 27
    assert err.partial["m1"] + err.partial["m2"] == 10


def test_step_limit_is_not_a_truncation():
    # landing exactly at the limit is fine, one short is not
    assert stopping_profile(7, step_limit=11).m == 11
    with pytest.raises(StepLimitExceeded):
        stopping_profile(7, step_limit=10)
    with pytest.raises(StepLimitExceeded):
        flight_profile(7, step_limit=15)
    assert flight_profile(7, step_limit=16).route == 16


@pytest.mark.parametrize(
    "n, route, height",
    [(6, 8, 16), (7, 16, 52), (1, 0, 1), (27, 111, 9232)],
)
def test_flight_examples(n, route, height):
    p = flight_profile(n)
    assert (p.route, p.max_height) == (route, height)
    assert p.route == p.odd_count + p.even_count


def test_oe_ratio_of_six():
    r = oe_ratio(6)
    assert (r.odd_count, r.even_count) == (2, 6)
    assert r.value == Fraction(1, 3)
    assert r.decimal() == "0.333333"


def test_oe_ratio_needs_two():
    with pytest.raises(ValueError):
        oe_ratio(1)


def test_render_fraction_rounds_half_up():
    assert render_fraction(Fraction(1, 8), 2) == "0.13"
    assert render_fraction(Fraction(2, 3), 0) == "1"
    assert render_fraction(Fraction(49, 81), 6) == "0.604938"


def test_log_ratio_constant_brackets_the_bound():
    # 3**p < 2**q  iff  p/q < log2/log3; spot-check around the constant
    assert LOG2_OVER_LOG3 < Fraction(631, 1000)
    assert LOG2_OVER_LOG3 > Fraction(6309, 10000)
    assert odd_even_bound_holds(12, 20)  # 12/20 = 0.6
    assert not odd_even_bound_holds(13, 20)  # 0.65


def test_matches_oracle_exhaustively_below_5000():
    for n in range(2, 5000):
        p = stopping_profile(n)
        assert (p.m, p.m1, p.m2, p.landing) == naive_stop(n)
        f = flight_profile(n)
        assert (f.route, f.max_height, f.odd_count, f.even_count) == naive_flight(n)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=1, max_value=2**100).map(lambda k: 2 * k))
def test_even_starts_stop_in_one_step(n):
    p = stopping_profile(n)
    assert (p.m, p.m1, p.m2, p.landing) == (1, 0, 1, n // 2)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=1, max_value=2**100))
def test_four_k_plus_one_rule(k):
    n = 4 * k + 1
    p = stopping_profile(n)
    assert (p.m, p.m1, p.m2, p.landing) == (3, 1, 2, 3 * k + 1)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=2, max_value=2**100))
def test_step_split_and_oracle_agreement(n):
    p = stopping_profile(n)
    assert p.m == p.m1 + p.m2
    assert p.landing < n
    assert (p.m, p.m1, p.m2, p.landing) == naive_stop(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=2**80))
def test_flight_invariants(n):
    f = flight_profile(n)
    s = stopping_profile(n)
    assert f.route == f.odd_count + f.even_count
    assert f.max_height >= n
    assert odd_even_bound_holds(f.odd_count, f.even_count)
    assert f.route >= s.m
    assert (f.route == s.m) == (s.landing == 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=2**200))
def test_fast_path_matches_pure_bignum(n):
    assert stopping_profile(n) == stopping_profile(n, fast=False)
    assert flight_profile(n) == flight_profile(n, fast=False)


@pytest.mark.parametrize("width", [64, 128])
def test_fast_path_straddles_width_guard(width):
    guard = ((1 << width) - 1) // 3
    rng = random.Random(width)
    starts = list(range(guard - 40, guard + 40))
    starts += [rng.randrange(guard // 4, 4 * guard) for _ in range(40)]
    for n in starts:
        assert flight_profile(n, fast_width=width) == flight_profile(n, fast=False)
        assert stopping_profile(n, fast_width=width) == stopping_profile(n, fast=False)


def test_height_record_leaves_64_bits_but_not_128():
    n = 10709980568908647
    assert needs_bignum(n, 64)
    assert not needs_bignum(n, 128)
    peak = 350589187937078188831873920282244
    assert flight_profile(n, fast_width=64).max_height == peak
    assert flight_profile(n).max_height == peak
    assert flight_profile(n, fast=False).max_height == peak


def test_starts_beyond_128_bits():
    n = 2**130 + 7
    assert flight_profile(n) == flight_profile(n, fast=False)
    assert stopping_profile(n).m == naive_stop(n)[0]
