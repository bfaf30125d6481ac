"""Residue-class sieve over classes ``2**b * k + r``.

A class is followed symbolically as ``a*k + c``.  While ``a`` is even the
parity of every member is that of ``c``, so the class moves as one.  It is
eliminated once ``a < 2**b`` and ``c <= r``: from then on every member with
``k >= 1`` sits below its start.  It survives when ``a`` turns odd first.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

MAX_BITS = 24


class ParityUndetermined(ValueError):
    """The class coefficient is odd, so member parities differ."""


@dataclass(frozen=True)
class AffineClass:
    a: int
    b_const: int
    origin_modulus: int
    origin_residue: int
    even_steps: int = 0
    odd_steps: int = 0

    @classmethod
    def start(cls, bits: int, residue: int) -> AffineClass:
        modulus = 1 << bits
        return cls(modulus, residue, modulus, residue)

    def below_start(self) -> bool:
        """Whether ``a*k + c < M*k + r`` is settled for every ``k >= 1``."""
        return self.a < self.origin_modulus and self.b_const <= self.origin_residue

    @property
    def steps(self) -> int:
        return self.even_steps + self.odd_steps


def advance(c: AffineClass) -> AffineClass:
    if c.a & 1:
        raise ParityUndetermined(f"{c.a}k+{c.b_const} has odd coefficient")
    if c.b_const & 1:
        return replace(c, a=3 * c.a, b_const=3 * c.b_const + 1, odd_steps=c.odd_steps + 1)
    return replace(c, a=c.a >> 1, b_const=c.b_const >> 1, even_steps=c.even_steps + 1)


def classify_residue(bits: int, residue: int) -> tuple[bool, int]:
    """Run one residue to its fate: ``(survives, steps taken)``."""
    c = AffineClass.start(bits, residue)
    while True:
        try:
            c = advance(c)
        except ParityUndetermined:
            return True, c.steps
        if c.below_start():
            return False, c.steps


def _classify_all(bits: int) -> tuple[list[int], dict[int, int]]:
    # integer-only twin of classify_residue; avoids a dataclass per step
    modulus = 1 << bits
    survivors: list[int] = []
    bounds: dict[int, int] = {}
    for r in range(modulus):
        a, c, steps = modulus, r, 0
        while True:
            if a & 1:
                survivors.append(r)
                break
            if c & 1:
                a, c = 3 * a, 3 * c + 1
            else:
                a, c = a >> 1, c >> 1
            steps += 1
            if a < modulus and c <= r:
                bounds[r] = steps
                break
    return survivors, bounds


@dataclass(frozen=True, eq=False)
class SieveTable:
    bits: int
    survivors: tuple[int, ...]
    eliminated_step_bound: dict[int, int]
    bitmap: np.ndarray

    @property
    def modulus(self) -> int:
        return 1 << self.bits

    @property
    def coverage(self) -> Fraction:
        return Fraction(len(self.survivors), self.modulus)

    def is_survivor(self, residue: int) -> bool:
        i = bisect_left(self.survivors, residue)
        return i < len(self.survivors) and self.survivors[i] == residue

    def __repr__(self) -> str:
        return f"SieveTable(bits={self.bits}, survivors={len(self.survivors)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SieveTable):
            return NotImplemented
        return self.bits == other.bits and self.survivors == other.survivors


def build_sieve(bits: int) -> SieveTable:
    if not 1 <= bits <= MAX_BITS:
        raise ValueError(f"sieve bits must be in [1, {MAX_BITS}], got {bits}")
    survivors, bounds = _classify_all(bits)
    bitmap = np.zeros(1 << bits, dtype=np.uint8)
    bitmap[survivors] = 1
    bitmap.setflags(write=False)
    return SieveTable(bits, tuple(survivors), bounds, bitmap)


def is_skippable(n: int, table: SieveTable) -> bool:
    if n < table.modulus:
        raise ValueError(
            f"{n} is below the sieve modulus {table.modulus}; check it directly"
        )
    return not table.bitmap[n & (table.modulus - 1)]


def empty_bitmap() -> np.ndarray:
    """Placeholder bitmap for kernels run without a sieve."""
    return np.zeros(1, dtype=np.uint8)
