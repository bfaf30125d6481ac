"""Exact Collatz trajectory engine.

Every start is first run through the two-limb fixed-width kernel; when a
value would leave the configured width, the exact state is handed to the
Python-integer loop, so results never depend on which path ran.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _fast

DEFAULT_STEP_LIMIT = 10**6
DEFAULT_FAST_WIDTH = 128

# floor(log2/log3 * 10**60); log2/log3 is irrational so the bracket is strict
LOG2_OVER_LOG3_NUM = 630929753571457437099527114342760854299585640131880427870654
LOG2_OVER_LOG3_DEN = 10**60
LOG2_OVER_LOG3 = Fraction(LOG2_OVER_LOG3_NUM, LOG2_OVER_LOG3_DEN)

_MASK64 = _fast.MASK64
_FAST_LIMIT = 1 << 128


class StepLimitExceeded(RuntimeError):
    """No target value reached within the step limit.

    ``partial`` holds the counters and the current value at the point the
    limit was hit.
    """

    def __init__(self, n: int, step_limit: int, partial: dict):
        super().__init__(f"start {n} did not land within {step_limit} transforms")
        self.n = n
        self.step_limit = step_limit
        self.partial = partial


@dataclass(frozen=True)
class StoppingProfile:
    start: int
    m: int
    m1: int
    m2: int
    landing: int | None
    defined: bool = True


@dataclass(frozen=True)
class TrajectoryProfile:
    start: int
    route: int
    max_height: int
    odd_count: int
    even_count: int


@dataclass(frozen=True)
class Ratio:
    """Exact odd/even transform ratio of a full flight."""

    odd_count: int
    even_count: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.odd_count, self.even_count)

    def decimal(self, places: int = 6) -> str:
        return render_fraction(self.value, places)

    def below_log_bound(self) -> bool:
        return odd_even_bound_holds(self.odd_count, self.even_count)


def render_fraction(q: Fraction, places: int = 6) -> str:
    """Round-half-up decimal rendering of a non-negative rational."""
    scale = 10**places
    num = q.numerator * scale * 2 + q.denominator
    units = num // (2 * q.denominator)
    whole, frac = divmod(units, scale)
    if places == 0:
        return str(whole)
    return f"{whole}.{frac:0{places}d}"


def odd_even_bound_holds(odd: int, even: int) -> bool:
    """``odd * log 3 < even * log 2``, decided with exact integers.

    Equivalent to ``3**odd < 2**even``.
    """
    return 3**odd < 1 << even


def collatz_step(x: int) -> int:
    if x < 1:
        raise ValueError(f"Collatz step needs x >= 1, got {x}")
    return 3 * x + 1 if x & 1 else x >> 1


def _limbs(x: int) -> tuple[np.uint64, np.uint64]:
    return np.uint64(x >> 64), np.uint64(x & _MASK64)


def _join(hi, lo) -> int:
    return (int(hi) << 64) | int(lo)


def _check_start(n: int, step_limit: int) -> None:
    if n < 1:
        raise ValueError(f"flight start must be >= 1, got {n}")
    if step_limit < 1:
        raise ValueError(f"step_limit must be >= 1, got {step_limit}")


def _stop_big(n: int, x: int, m1: int, m2: int, step_limit: int) -> StoppingProfile:
    while True:
        if m1 + m2 >= step_limit:
            raise StepLimitExceeded(n, step_limit, {"m1": m1, "m2": m2, "value": x})
        if x & 1:
            x = 3 * x + 1
            m1 += 1
        else:
            x >>= 1
            m2 += 1
            if x < n:
                return StoppingProfile(n, m1 + m2, m1, m2, x)


def stopping_profile(
    n: int,
    step_limit: int = DEFAULT_STEP_LIMIT,
    *,
    fast: bool = True,
    fast_width: int = DEFAULT_FAST_WIDTH,
) -> StoppingProfile:
    """Transforms until the first value below ``n``.

    ``n = 1`` never drops below itself and yields ``defined=False``.
    With ``fast=False`` only Python integers are used.
    """
    _check_start(n, step_limit)
    if n == 1:
        return StoppingProfile(1, 0, 0, 0, None, defined=False)
    m1 = m2 = 0
    x = n
    if fast and n < _FAST_LIMIT:
        ghi, glo = _fast.guard_for_width(fast_width)
        nhi, nlo = _limbs(n)
        status, m1, m2, hi, lo = _fast.stop_kernel(
            nhi, nlo, np.uint64(ghi), np.uint64(glo), 0, 0, nhi, nlo, step_limit
        )
        x = _join(hi, lo)
        if status == _fast.LANDED:
            return StoppingProfile(n, m1 + m2, m1, m2, x)
    return _stop_big(n, x, m1, m2, step_limit)


def _flight_big(n, x, odd, even, peak, step_limit) -> TrajectoryProfile:
    while x != 1:
        if odd + even >= step_limit:
            raise StepLimitExceeded(
                n, step_limit, {"odd": odd, "even": even, "value": x, "max_height": peak}
            )
        if x & 1:
            x = 3 * x + 1
            odd += 1
            if x > peak:
                peak = x
        else:
            x >>= 1
            even += 1
    return TrajectoryProfile(n, odd + even, peak, odd, even)


def flight_profile(
    n: int,
    step_limit: int = DEFAULT_STEP_LIMIT,
    *,
    fast: bool = True,
    fast_width: int = DEFAULT_FAST_WIDTH,
) -> TrajectoryProfile:
    """Full flight of ``n`` down to 1: route, peak and transform counts."""
    _check_start(n, step_limit)
    odd = even = 0
    x = peak = n
    if fast and n < _FAST_LIMIT:
        ghi, glo = _fast.guard_for_width(fast_width)
        nhi, nlo = _limbs(n)
        status, odd, even, hi, lo, mhi, mlo = _fast.flight_kernel(
            np.uint64(ghi), np.uint64(glo), 0, 0, nhi, nlo, nhi, nlo, step_limit
        )
        x, peak = _join(hi, lo), _join(mhi, mlo)
        if status == _fast.LANDED:
            return TrajectoryProfile(n, odd + even, peak, odd, even)
    return _flight_big(n, x, odd, even, peak, step_limit)


def needs_bignum(n: int, fast_width: int = DEFAULT_FAST_WIDTH) -> bool:
    """True when the flight of ``n`` leaves the fixed-width fast path.

    That happens exactly when some odd value met on the way to 1 is at or
    above the width guard ``(2**w - 1) // 3``.
    """
    ghi, glo = _fast.guard_for_width(fast_width)
    guard = _join(ghi, glo)
    x = n
    while x != 1:
        if x & 1:
            if x >= guard:
                return True
            x = 3 * x + 1
        else:
            x >>= 1
    return False


def oe_ratio(n: int, step_limit: int = DEFAULT_STEP_LIMIT) -> Ratio:
    if n < 2:
        raise ValueError(f"odd/even ratio needs n >= 2, got {n}")
    p = flight_profile(n, step_limit)
    return Ratio(p.odd_count, p.even_count)
