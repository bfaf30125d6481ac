"""Heuristic-model statistics: drift constant, mean stopping time, height probe."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .core import DEFAULT_STEP_LIMIT, flight_profile, render_fraction
from .scan import iter_flight_counts, iter_stop_counts

WAGON_MEAN = Fraction(9477955, 10**6)


@dataclass(frozen=True)
class DriftResult:
    terms: int
    product: mpmath.mpf
    closed_form: mpmath.mpf
    precision: int

    def agree(self) -> bool:
        """Product and closed form agree to the working precision, less 3 digits."""
        tol = mpmath.mpf(10) ** (-(self.precision - 3))
        return abs(self.product - self.closed_form) <= tol


def drift_constant(terms: int, precision: int = 30) -> DriftResult:
    """Truncated product of ``(3 / 2**k) ** (2**-k)`` for ``k = 1..terms``.

    The closed form uses the finite exponent sums
    ``sum 2**-k = 1 - 2**-T`` and ``sum k 2**-k = 2 - (T + 2) 2**-T``.
    """
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    if precision < 10:
        raise ValueError(f"precision must be >= 10 digits, got {precision}")
    with mpmath.workdps(precision + 10):
        product = mpmath.mpf(1)
        for k in range(1, terms + 1):
            w = mpmath.mpf(2) ** -k
            product *= (mpmath.mpf(3) / mpmath.mpf(2) ** k) ** w
        tail = mpmath.mpf(2) ** -terms
        closed = mpmath.mpf(3) ** (1 - tail) / mpmath.mpf(2) ** (2 - (terms + 2) * tail)
    return DriftResult(terms, +product, +closed, precision)


def drift_exponent_sums(terms: int) -> tuple[Fraction, Fraction]:
    """Exact ``(sum 2**-k, sum k 2**-k)`` for ``k = 1..terms``."""
    return (
        sum((Fraction(1, 2**k) for k in range(1, terms + 1)), Fraction(0)),
        sum((Fraction(k, 2**k) for k in range(1, terms + 1)), Fraction(0)),
    )


@dataclass(frozen=True)
class MeanStats:
    lo: int
    hi: int
    count: int
    total_m: int
    total_m1: int
    odd_only: bool = False

    @property
    def mean(self) -> Fraction:
        return Fraction(self.total_m, self.count)

    @property
    def mean_m1(self) -> Fraction:
        return Fraction(self.total_m1, self.count)

    def decimal(self, places: int = 6) -> str:
        return render_fraction(self.mean, places)


def stop_sums(lo: int, hi: int, odd_only: bool = False, step_limit: int = DEFAULT_STEP_LIMIT):
    """``(count, sum m, sum m1)`` over ``[lo, hi)``; mergeable by addition."""
    count = total = total_m1 = 0
    for start, m1, m2 in iter_stop_counts(lo, hi, None, step_limit):
        if odd_only:
            sel = slice((start + 1) % 2, None, 2)
            m1, m2 = m1[sel], m2[sel]
        count += int(m1.size)
        total_m1 += int(m1.sum(dtype=np.int64))
        total += int(m1.sum(dtype=np.int64) + m2.sum(dtype=np.int64))
    return count, total, total_m1


def mean_stopping_time(
    lo: int,
    hi: int,
    odd_only: bool = False,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> MeanStats:
    """Exact mean stopping time over the starts in ``[lo, hi)``.

    ``odd_only=True`` averages over odd starts only, the population the
    9.477955 limiting constant refers to; even starts all stop after one step.
    """
    if not 2 <= lo < hi:
        raise ValueError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    count, total, total_m1 = stop_sums(lo, hi, odd_only, step_limit)
    if count == 0:
        raise ValueError(f"no odd starts in [{lo}, {hi})")
    return MeanStats(lo, hi, count, total, total_m1, odd_only)


@dataclass(frozen=True)
class HeightProbe:
    upto: int
    K_const: int
    violations: tuple[tuple[int, int, int], ...]
    argmax: int
    max_ratio: Fraction

    @property
    def violating_starts(self) -> tuple[int, ...]:
        return tuple(n for n, _, _ in self.violations)


def height_bound_probe(
    upto: int, K_const: int, step_limit: int = DEFAULT_STEP_LIMIT
) -> HeightProbe:
    """Every ``2 <= n <= upto`` whose peak exceeds ``K_const * n**2``.

    Also returns the start maximising ``peak / n**2``.
    """
    if upto < 2:
        raise ValueError(f"upto must be >= 2, got {upto}")
    if K_const < 1:
        raise ValueError(f"K_const must be >= 1, got {K_const}")
    violations = []
    best_n, best = 2, Fraction(0)
    slack = 1 - 1e-9
    for block in iter_flight_counts(2, upto + 1, step_limit):
        n = np.arange(block.lo, block.lo + block.odd.size, dtype=np.float64)
        ratio = block.peak_approx / (n * n)
        for i in np.flatnonzero(ratio > K_const * slack):
            start = block.lo + int(i)
            h = block.peak(int(i))
            if h > K_const * start * start:
                violations.append((start, h, K_const * start * start))
        for i in np.flatnonzero(ratio >= max(ratio.max(), float(best)) * slack):
            start = block.lo + int(i)
            q = Fraction(block.peak(int(i)), start * start)
            if q > best:
                best_n, best = start, q
    return HeightProbe(upto, K_const, tuple(violations), best_n, best)


def recheck_probe(probe: HeightProbe, step_limit: int = DEFAULT_STEP_LIMIT) -> bool:
    return all(
        flight_profile(n, step_limit).max_height == h for n, h, _ in probe.violations
    )
