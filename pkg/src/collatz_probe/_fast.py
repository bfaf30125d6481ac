"""Fixed-width kernels for the trajectory engine.

Values are held as two unsigned 64-bit limbs ``(hi, lo)``.  Before every
``3x+1`` the kernel compares ``x`` against a guard ``(2**w - 1) // 3`` for
the configured width ``w``; at or above the guard it stops and hands the
exact state back to the caller, who continues with Python integers.

Status codes returned by the scalar kernels:

* ``LANDED``   - target reached (value below start / value 1)
* ``OVERFLOW`` - guard hit, state returned for bignum continuation
* ``LIMIT``    - step limit reached before the target
"""

from __future__ import annotations

import numpy as np
from numba import njit

LANDED = 0
OVERFLOW = 1
LIMIT = 2

# m2/m1 sentinels written by the block kernels
SKIPPED = -1
DEFERRED = -2

MASK64 = (1 << 64) - 1

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_U3 = np.uint64(3)
_U63 = np.uint64(63)


def guard_for_width(width: int) -> tuple[int, int]:
    """Return the two-limb guard for an arithmetic width in bits (<= 128)."""
    if not 2 <= width <= 128:
        raise ValueError(f"fast-path width must be in [2, 128], got {width}")
    g = ((1 << width) - 1) // 3
    return g >> 64, g & MASK64


@njit(inline="always")
def _lt(ahi, alo, bhi, blo):
    return ahi < bhi or (ahi == bhi and alo < blo)


@njit(inline="always")
def _half(hi, lo):
    return hi >> _U1, (lo >> _U1) | (hi << _U63)


@njit(inline="always")
def _triple_plus_one(hi, lo):
    c = lo >> _U63
    s = (lo << _U1) + lo
    if s < lo:
        c += _U1
    s2 = s + _U1
    if s2 == _U0:
        c += _U1
    return hi * _U3 + c, s2


@njit(nogil=True, cache=True)
def stop_kernel(nhi, nlo, ghi, glo, m1, m2, hi, lo, limit):
    """Iterate from state (hi, lo) until the value drops below n = (nhi, nlo)."""
    while True:
        if m1 + m2 >= limit:
            return LIMIT, m1, m2, hi, lo
        if lo & _U1:
            if not _lt(hi, lo, ghi, glo):
                return OVERFLOW, m1, m2, hi, lo
            hi, lo = _triple_plus_one(hi, lo)
            m1 += 1
        else:
            hi, lo = _half(hi, lo)
            m2 += 1
            if _lt(hi, lo, nhi, nlo):
                return LANDED, m1, m2, hi, lo


@njit(nogil=True, cache=True)
def flight_kernel(ghi, glo, odd, even, hi, lo, mhi, mlo, limit):
    """Iterate from state (hi, lo) until the value 1, tracking the peak (mhi, mlo)."""
    while not (hi == _U0 and lo == _U1):
        if odd + even >= limit:
            return LIMIT, odd, even, hi, lo, mhi, mlo
        if lo & _U1:
            if not _lt(hi, lo, ghi, glo):
                return OVERFLOW, odd, even, hi, lo, mhi, mlo
            hi, lo = _triple_plus_one(hi, lo)
            odd += 1
            if _lt(mhi, mlo, hi, lo):
                mhi, mlo = hi, lo
        else:
            hi, lo = _half(hi, lo)
            even += 1
    return LANDED, odd, even, hi, lo, mhi, mlo


@njit(inline="always")
def _skippable(n, mask, bitmap, modulus):
    if n & _U1 == _U0:
        return True
    return n >= modulus and bitmap[n & mask] == 0


@njit(nogil=True, cache=True)
def verify_block(lo, hi, bitmap, bits, ghi, glo, limit):
    """Below-start verification of [lo, hi) for 1 < lo and hi <= 2**63.

    Returns ``(pos, simulated, skipped)``.  ``pos == hi`` when the block is
    finished; otherwise ``pos`` is an odd start the caller must resolve with
    the exact engine before resuming at ``pos + 1``.
    """
    modulus = np.uint64(1) << np.uint64(bits)
    mask = modulus - _U1
    simulated = 0
    skipped = 0
    n = np.uint64(lo)
    end = np.uint64(hi)
    while n < end:
        if _skippable(n, mask, bitmap, modulus):
            skipped += 1
        else:
            status, _, _, _, _ = stop_kernel(_U0, n, ghi, glo, 0, 0, _U0, n, limit)
            if status != LANDED:
                return n, simulated, skipped
            simulated += 1
        n += _U1
    return end, simulated, skipped


@njit(nogil=True, cache=True)
def stop_block(lo, hi, bitmap, bits, ghi, glo, limit, m1_out, m2_out):
    """Fill stopping-time odd/even counts for every n in [lo, hi), 2 <= lo.

    Sieve-skippable starts get ``SKIPPED``; starts the kernel cannot finish
    get ``DEFERRED`` (in both arrays).  Pass ``bits == 0`` to disable the
    sieve entirely (even starts are then simulated too).
    """
    modulus = np.uint64(1) << np.uint64(bits)
    mask = modulus - _U1
    for i in range(hi - lo):
        n = np.uint64(lo + i)
        if bits > 0 and _skippable(n, mask, bitmap, modulus):
            m1_out[i] = SKIPPED
            m2_out[i] = SKIPPED
            continue
        status, m1, m2, _, _ = stop_kernel(_U0, n, ghi, glo, 0, 0, _U0, n, limit)
        if status == LANDED:
            m1_out[i] = m1
            m2_out[i] = m2
        else:
            m1_out[i] = DEFERRED
            m2_out[i] = DEFERRED


@njit(nogil=True, cache=True)
def flight_block(lo, hi, ghi, glo, limit, odd_out, even_out, hhi_out, hlo_out):
    """Full-flight odd/even counts and peaks for n in [lo, hi), 1 <= lo.

    Unfinished starts get ``DEFERRED`` in ``odd_out``.
    """
    for i in range(hi - lo):
        n = np.uint64(lo + i)
        status, odd, even, _, _, mhi, mlo = flight_kernel(
            ghi, glo, 0, 0, _U0, n, _U0, n, limit
        )
        if status == LANDED:
            odd_out[i] = odd
            even_out[i] = even
            hhi_out[i] = mhi
            hlo_out[i] = mlo
        else:
            odd_out[i] = DEFERRED
