from fractions import Fraction

import mpmath
import pytest

from collatz_probe.heuristics import (
    drift_constant,
    drift_exponent_sums,
    height_bound_probe,
    mean_stopping_time,
    recheck_probe,
)
from oracles import naive_flight, naive_stop


def test_single_factor():
    d = drift_constant(1)
    assert abs(d.product - mpmath.sqrt(mpmath.mpf(3) / 2)) < mpmath.mpf(10) ** -25
    assert mpmath.nstr(d.product, 7) == "1.224745"


def test_two_factors():
    d = drift_constant(2)
    assert mpmath.nstr(d.product, 7) == "1.139754"


def test_sixty_terms_reach_three_quarters():
    d = drift_constant(60, precision=20)
    assert abs(d.product - mpmath.mpf("0.75")) < mpmath.mpf(10) ** -15


@pytest.mark.parametrize("terms", [1, 2, 5, 17, 40, 60])
def test_closed_form(terms):
    d = drift_constant(terms)
    assert d.agree()
    s1, s2 = drift_exponent_sums(terms)
    assert s1 == 1 - Fraction(1, 2**terms)
    assert s2 == 2 - Fraction(terms + 2, 2**terms)


def test_partial_products_fall_after_first_factor():
    vals = [drift_constant(t).product for t in range(1, 30)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert all(v > mpmath.mpf("0.75") for v in vals)


def test_argument_checks():
    with pytest.raises(ValueError):
        drift_constant(0)
    with pytest.raises(ValueError):
        drift_constant(3, precision=5)


def test_mean_examples():
    assert mean_stopping_time(2, 4).mean == Fraction(7, 2)
    assert mean_stopping_time(2, 3).mean == 1
    assert mean_stopping_time(2, 4).decimal(1) == "3.5"


def test_mean_matches_oracle():
    s = mean_stopping_time(2, 5000)
    ms = [naive_stop(n) for n in range(2, 5000)]
    assert s.mean == Fraction(sum(m for m, *_ in ms), len(ms))
    assert s.mean_m1 == Fraction(sum(m1 for _, m1, *_ in ms), len(ms))
    odd = mean_stopping_time(3, 5000, odd_only=True)
    ms_odd = [naive_stop(n)[0] for n in range(3, 5000, 2)]
    assert odd.mean == Fraction(sum(ms_odd), len(ms_odd))


def test_odd_only_mean_of_a_range_starting_even():
    assert mean_stopping_time(6, 9, odd_only=True).mean == 11  # only 7


def test_mean_rejects_bad_range():
    with pytest.raises(ValueError):
        mean_stopping_time(1, 10)
    with pytest.raises(ValueError):
        mean_stopping_time(4, 4)


def test_height_probe_examples():
    assert height_bound_probe(20, 8).violations == ()
    p = height_bound_probe(30, 8)
    assert p.violations == ((27, 9232, 5832),)
    assert height_bound_probe(4, 1).violating_starts == (3,)
    assert recheck_probe(p)


def test_height_probe_matches_oracle():
    upto = 3000
    p = height_bound_probe(upto, 8)
    peaks = {n: naive_flight(n)[1] for n in range(2, upto + 1)}
    assert p.violating_starts == tuple(n for n, h in peaks.items() if h > 8 * n * n)
    best = max(peaks, key=lambda n: Fraction(peaks[n], n * n))
    assert p.argmax == best
    assert p.max_ratio == Fraction(peaks[best], best * best)


def test_height_probe_shrinks_as_k_grows():
    sizes = [len(height_bound_probe(2000, K).violations) for K in (1, 2, 4, 8, 16)]
    assert all(b <= a for a, b in zip(sizes, sizes[1:]))
