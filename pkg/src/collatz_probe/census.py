"""Violator census for stopping-time even-transform counts.

A start ``n < 2**K`` is a *violator at level K* when its stopping time
contains more than ``K`` halvings.  No violators at some level N would
bound every stopping time; this module counts them, follows how they
carry from one level to the next, and summarises the trend across levels.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import DEFAULT_STEP_LIMIT, stopping_profile
from .scan import iter_stop_counts
from .sieve import SieveTable

MAX_K = 30
FULL_LIST_MAX_K = 24
SAMPLE_SIZE = 4096


class IncompleteViolatorList(ValueError):
    """A report holds only a violator sample where the full list is needed."""


def sample_key(n: int) -> int:
    """splitmix64 of ``n``; violators with the smallest keys form the sample.

    Keying on a hash of ``n`` rather than on scan order keeps the sample
    identical under any partitioning of the range.
    """
    z = (n + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def merge_samples(a: list[int], b: list[int], cap: int = SAMPLE_SIZE) -> list[int]:
    keep = heapq.nsmallest(cap, set(a) | set(b), key=sample_key)
    return sorted(keep)


@dataclass(frozen=True)
class CensusReport:
    K: int
    population: int
    x: int
    violators_sample: tuple[int, ...]
    max_m2: int
    violators_complete: bool = True

    @property
    def premise_holds(self) -> bool:
        return self.x == 0


def _check_k(K: int) -> None:
    if not 1 <= K <= MAX_K:
        raise ValueError(f"census level must be in [1, {MAX_K}], got {K}")


def census_range(
    lo: int,
    hi: int,
    K: int,
    table: SieveTable | None = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
    full_list: bool = True,
) -> dict:
    """Census partial over ``[lo, hi)`` as a mergeable dict."""
    count = 0
    max_m2 = 0
    violators: list[int] = []
    for start, _, m2 in iter_stop_counts(max(lo, 2), hi, table, step_limit):
        if m2.size == 0:
            continue
        max_m2 = max(max_m2, int(m2.max()))
        idx = np.flatnonzero(m2 > K)
        count += int(idx.size)
        found = [start + int(i) for i in idx]
        if full_list:
            violators.extend(found)
        else:
            violators = merge_samples(violators, found)
    return {"x": count, "max_m2": max_m2, "violators": violators}


def merge_census_partials(a: dict, b: dict, full_list: bool = True) -> dict:
    if full_list:
        violators = sorted(a["violators"] + b["violators"])
    else:
        violators = merge_samples(a["violators"], b["violators"])
    return {
        "x": a["x"] + b["x"],
        "max_m2": max(a["max_m2"], b["max_m2"]),
        "violators": violators,
    }


def report_from_partial(K: int, partial: dict, full_list: bool) -> CensusReport:
    return CensusReport(
        K=K,
        population=max(0, (1 << K) - 2),
        x=partial["x"],
        violators_sample=tuple(partial["violators"]),
        max_m2=partial["max_m2"],
        violators_complete=full_list,
    )


def census(
    K: int,
    table: SieveTable | None = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> CensusReport:
    """Count every ``n`` in ``[2, 2**K)`` with more than ``K`` halvings.

    With a sieve table, starts it can skip are counted compliant unsimulated;
    their halving count is at most ``table.bits <= K``.  ``max_m2`` is then
    exact whenever ``x > 0``.
    """
    _check_k(K)
    if table is not None and table.bits > K:
        raise ValueError(f"sieve bits {table.bits} exceed census level {K}")
    full = K <= FULL_LIST_MAX_K
    partial = census_range(2, 1 << K, K, table, step_limit, full)
    return report_from_partial(K, partial, full)


def reverify(report: CensusReport, step_limit: int = DEFAULT_STEP_LIMIT) -> list[int]:
    """Recompute each listed violator; return the ones that do not hold up."""
    bad = []
    for v in report.violators_sample:
        p = stopping_profile(v, step_limit)
        if not (v < 1 << report.K and p.defined and p.m2 > report.K):
            bad.append(v)
    return bad


@dataclass(frozen=True)
class LiftReport:
    k: int
    carried_candidates: int
    became_compliant: int
    lift_fraction: Fraction
    carry_violations: tuple[int, ...]
    lifted: tuple[int, ...] = ()


def lift_analysis(
    k: int,
    prev: CensusReport,
    next: CensusReport,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> LiftReport:
    """Follow level-``k`` violators ``i`` to ``i + 2**k`` at level ``k + 1``.

    Also lists every level-(k+1) violator in ``[2**k, 2**(k+1))`` that is
    neither ``2**k`` nor a lifted level-k violator.  A non-empty list is
    evidence against the carry argument, so it is reported, not assumed away.
    """
    if prev.K != k or next.K != k + 1:
        raise ValueError(f"need census reports for levels {k} and {k + 1}")
    if not (prev.violators_complete and next.violators_complete):
        raise IncompleteViolatorList(f"levels {k}/{k + 1} carry only violator samples")
    shift = 1 << k
    prev_set = set(prev.violators_sample)
    lifted = tuple(i + shift for i in prev.violators_sample)
    became = sum(1 for v in lifted if stopping_profile(v, step_limit).m2 <= k + 1)
    carry = tuple(
        v
        for v in next.violators_sample
        if shift <= v < 2 * shift and v != shift and v - shift not in prev_set
    )
    return LiftReport(
        k=k,
        carried_candidates=len(lifted) + 1,
        became_compliant=became,
        lift_fraction=Fraction(became, max(1, len(prev.violators_sample))),
        carry_violations=carry,
        lifted=lifted,
    )


@dataclass(frozen=True)
class TrendReport:
    levels: tuple[tuple[int, int], ...]
    growth_ratios: tuple[tuple[int, Fraction], ...]
    tier1: bool
    tier2: bool
    tier3: bool
    window: int = 4

    @property
    def x_sequence(self) -> tuple[int, ...]:
        return tuple(x for _, x in self.levels)

    @property
    def tier(self) -> int:
        """Strongest tier present (1 is strongest), 0 if none."""
        for t, hit in ((1, self.tier1), (2, self.tier2), (3, self.tier3)):
            if hit:
                return t
        return 0


def violator_counts(
    K_max: int,
    table: SieveTable | None = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> list[int]:
    """``x(K)`` for ``K = 1..K_max`` from one pass over ``[2, 2**K_max)``.

    ``n`` is a violator exactly for ``bit_length(n) <= K < m2(n)``, so each
    start adds one to a difference array over that interval of levels.
    """
    diff = np.zeros(K_max + 2, dtype=np.int64)
    for j in range(1, K_max):
        lo, hi = 1 << j, 1 << (j + 1)
        width = j + 1
        for _, _, m2 in iter_stop_counts(lo, hi, table, step_limit):
            hits = m2[m2 > width]
            if hits.size == 0:
                continue
            diff[width] += hits.size
            np.subtract.at(diff, np.minimum(hits, K_max + 1), 1)
    return [int(v) for v in np.cumsum(diff)[1 : K_max + 1]]


def _strictly_decreasing(seq) -> bool:
    return all(b < a for a, b in zip(seq, seq[1:]))


def classify_trend(xs: list[int], window: int = 4) -> TrendReport:
    levels = tuple((K, x) for K, x in enumerate(xs, start=1))
    ratios = tuple(
        (K, Fraction(xs[K], xs[K - 1])) for K in range(1, len(xs)) if xs[K - 1] > 0
    )
    tier1 = any(x == 0 for K, x in levels if K >= 2)
    tail = xs[-(window + 1) :]
    tier2 = len(tail) == window + 1 and _strictly_decreasing(tail)
    rtail = [r for _, r in ratios][-window:]
    tier3 = len(rtail) == window and _strictly_decreasing(rtail)
    return TrendReport(levels, ratios, tier1, tier2, tier3, window)


def trend(
    K_max: int,
    table: SieveTable | None = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
    window: int = 4,
) -> TrendReport:
    """Census every level ``1..K_max`` and classify the pattern.

    tier 1: some ``x(N) = 0`` with ``N >= 2``; tier 2: ``x`` strictly falls
    over the last ``window`` steps; tier 3: the growth ratio strictly falls
    over the last ``window`` ratios.
    """
    _check_k(K_max)
    if table is not None and table.bits > K_max:
        raise ValueError(f"sieve bits {table.bits} exceed K_max {K_max}")
    return classify_trend(violator_counts(K_max, table, step_limit), window)
