"""Naive reference implementations, independent of the package code."""

from __future__ import annotations


def naive_stop(n: int) -> tuple[int, int, int, int]:
    """(m, m1, m2, landing) by plain iteration; n >= 2."""
    x, m1, m2 = n, 0, 0
    while x >= n:
        if x % 2:
            x = 3 * x + 1
            m1 += 1
        else:
            x //= 2
            m2 += 1
    return m1 + m2, m1, m2, x


def naive_flight(n: int) -> tuple[int, int, int, int]:
    """(route, max_height, odd, even)."""
    seq = [n]
    while seq[-1] != 1:
        x = seq[-1]
        seq.append(3 * x + 1 if x % 2 else x // 2)
    odd = sum(1 for x in seq[:-1] if x % 2)
    return len(seq) - 1, max(seq), odd, len(seq) - 1 - odd


def naive_violators(K: int) -> list[int]:
    return [n for n in range(2, 2**K) if naive_stop(n)[2] > K]


# x(K) for K = 1..16, frozen from naive_violators
X_SEQUENCE = (0, 1, 2, 3, 4, 8, 13, 19, 38, 64, 128, 226, 367, 734, 1295, 2114)

# survivor counts mod 2**b for b = 1..16, from a separate script of the
# a*k + c elimination rule (integer loop, no package code)
SURVIVOR_COUNTS = (1, 1, 2, 3, 4, 8, 13, 19, 38, 64, 128, 226, 367, 734, 1295, 2114)

SURVIVORS_256 = (
    27, 31, 47, 63, 71, 91, 103, 111, 127, 155,
    159, 167, 191, 207, 223, 231, 239, 251, 255,
)

# (k, |violators at k|, lifted violators compliant at k+1), from naive_stop
LIFT_COUNTS = (
    (2, 1, 0), (3, 2, 0), (4, 3, 1), (5, 4, 0), (6, 8, 0), (7, 13, 3),
    (8, 19, 0), (9, 38, 7), (10, 64, 0), (11, 128, 14), (12, 226, 44),
    (13, 367, 0), (14, 734, 82), (15, 1295, 239),
)
