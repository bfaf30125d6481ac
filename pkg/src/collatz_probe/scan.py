"""Range evaluation on top of the block kernels.

Blocks go through the fixed-width kernels; any start the kernel defers
(width guard hit, or step limit) is finished by the exact engine in
:mod:`collatz_probe.core`, which raises :class:`StepLimitExceeded` where
appropriate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _fast
from .core import (
    DEFAULT_FAST_WIDTH,
    DEFAULT_STEP_LIMIT,
    flight_profile,
    stopping_profile,
)
from .sieve import SieveTable, empty_bitmap

BLOCK = 1 << 16
_KERNEL_MAX = 1 << 63

SKIPPED = _fast.SKIPPED


def _guard(width: int = DEFAULT_FAST_WIDTH) -> tuple[np.uint64, np.uint64]:
    ghi, glo = _fast.guard_for_width(width)
    return np.uint64(ghi), np.uint64(glo)


def _sieve_args(table: SieveTable | None) -> tuple[np.ndarray, int]:
    if table is None:
        return empty_bitmap(), 0
    return table.bitmap, table.bits


def _python_skippable(n: int, table: SieveTable | None) -> bool:
    if table is None:
        return False
    if not n & 1:
        return True
    return n >= table.modulus and not table.bitmap[n & (table.modulus - 1)]


def stop_counts(
    lo: int,
    hi: int,
    table: SieveTable | None = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> tuple[np.ndarray, np.ndarray]:
    """Stopping-time odd and even counts for every start in ``[lo, hi)``.

    Entries for sieve-skippable starts are ``SKIPPED``.  Requires ``lo >= 2``.
    """
    if lo < 2:
        raise ValueError(f"stopping times are defined from 2 upward, got lo={lo}")
    size = max(0, hi - lo)
    m1 = np.empty(size, dtype=np.int32)
    m2 = np.empty(size, dtype=np.int32)
    if hi <= _KERNEL_MAX:
        bitmap, bits = _sieve_args(table)
        ghi, glo = _guard()
        _fast.stop_block(lo, hi, bitmap, bits, ghi, glo, step_limit, m1, m2)
        for i in np.flatnonzero(m2 == _fast.DEFERRED):
            p = stopping_profile(lo + int(i), step_limit)
            m1[i], m2[i] = p.m1, p.m2
        return m1, m2
    for i, n in enumerate(range(lo, hi)):
        if _python_skippable(n, table):
            m1[i] = m2[i] = SKIPPED
        else:
            p = stopping_profile(n, step_limit)
            m1[i], m2[i] = p.m1, p.m2
    return m1, m2


def iter_stop_counts(lo, hi, table=None, step_limit=DEFAULT_STEP_LIMIT, block=BLOCK):
    """Yield ``(block_lo, m1, m2)`` over ``[lo, hi)`` in ascending blocks."""
    for start in range(lo, hi, block):
        end = min(hi, start + block)
        m1, m2 = stop_counts(start, end, table, step_limit)
        yield start, m1, m2


@dataclass
class FlightBlock:
    """Full-flight data for a contiguous run of starts."""

    lo: int
    odd: np.ndarray
    even: np.ndarray
    peak_approx: np.ndarray
    _peak_hi: np.ndarray
    _peak_lo: np.ndarray
    _big_peaks: dict[int, int] = field(default_factory=dict)

    @property
    def route(self) -> np.ndarray:
        return self.odd + self.even

    def peak(self, i: int) -> int:
        if i in self._big_peaks:
            return self._big_peaks[i]
        return (int(self._peak_hi[i]) << 64) | int(self._peak_lo[i])


def flight_counts(lo: int, hi: int, step_limit: int = DEFAULT_STEP_LIMIT) -> FlightBlock:
    if lo < 1:
        raise ValueError(f"flights start at 1, got lo={lo}")
    size = max(0, hi - lo)
    odd = np.empty(size, dtype=np.int64)
    even = np.empty(size, dtype=np.int64)
    phi = np.zeros(size, dtype=np.uint64)
    plo = np.zeros(size, dtype=np.uint64)
    big: dict[int, int] = {}
    if hi <= _KERNEL_MAX:
        ghi, glo = _guard()
        _fast.flight_block(lo, hi, ghi, glo, step_limit, odd, even, phi, plo)
        deferred = np.flatnonzero(odd == _fast.DEFERRED)
    else:
        deferred = range(size)
    for i in deferred:
        i = int(i)
        p = flight_profile(lo + i, step_limit)
        odd[i], even[i] = p.odd_count, p.even_count
        big[i] = p.max_height
    approx = phi.astype(np.float64) * 18446744073709551616.0 + plo.astype(np.float64)
    for i, h in big.items():
        approx[i] = float(h)
    return FlightBlock(lo, odd, even, approx, phi, plo, big)


def iter_flight_counts(lo, hi, step_limit=DEFAULT_STEP_LIMIT, block=BLOCK):
    for start in range(lo, hi, block):
        yield flight_counts(start, min(hi, start + block), step_limit)
