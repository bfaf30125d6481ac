"""Resumable, parallel range execution.

A plan splits ``[lo, hi)`` into disjoint ascending work units.  Units run on
a thread pool (the kernels release the GIL) and their partial results are
merged in plan order, so the final report does not depend on the worker
count or on completion order.

Checkpoint format, one record per line::

    collatz-probe-ckpt v1 <task> <lo> <hi> <chunk>
    done <lo> <hi> <sha256-16>:<partial-json>

The file is rewritten through a temporary file and ``os.replace`` after
every completed unit.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _fast
from .census import (
    FULL_LIST_MAX_K,
    census_range,
    merge_census_partials,
    report_from_partial,
)
from .core import DEFAULT_STEP_LIMIT, StepLimitExceeded, render_fraction, stopping_profile
from .heuristics import MeanStats, stop_sums
from .records import KIND_ALIASES, RecordLog, scan_records
from .report import kv_line
from .scan import _KERNEL_MAX, _guard
from .sieve import SieveTable, build_sieve

log = logging.getLogger(__name__)

CKPT_MAGIC = "collatz-probe-ckpt"
CKPT_VERSION = "v1"
DEFAULT_CHUNK = 1 << 20
DEFAULT_SIEVE_BITS = 16


class EmptyRange(ValueError):
    pass


class CheckpointCorrupt(RuntimeError):
    pass


class ExecutionInterrupted(RuntimeError):
    """Raised when a run is stopped on purpose after some units."""


@dataclass(frozen=True)
class WorkUnit:
    lo: int
    hi: int
    task: str
    sieve_bits: int = 0


# ---------------------------------------------------------------- verify


@dataclass
class VerifyReport:
    lo: int
    hi: int
    sieve_bits: int
    flights_simulated: int = 0
    flights_skipped_by_sieve: int = 0
    counterexample_candidates: list[int] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def simulated_fraction(self) -> str:

        return render_fraction(Fraction(self.flights_simulated, self.hi - self.lo), 6)

    def lines(self, include_timing: bool = False) -> list[str]:
        out = [
            kv_line(
                report="verify",
                lo=self.lo,
                hi=self.hi,
                sieve_bits=self.sieve_bits,
                flights_simulated=self.flights_simulated,
                flights_skipped_by_sieve=self.flights_skipped_by_sieve,
                simulated_fraction=self.simulated_fraction,
                counterexample_candidates=len(self.counterexample_candidates),
            )
        ]
        out += [kv_line(candidate=n) for n in self.counterexample_candidates]
        if include_timing:
            out.append(kv_line(wall_time=f"{self.wall_time:.3f}"))
        return out

    def as_dict(self) -> dict:
        return {
            "range": [self.lo, self.hi],
            "sieve_bits": self.sieve_bits,
            "flights_simulated": self.flights_simulated,
            "flights_skipped_by_sieve": self.flights_skipped_by_sieve,
            "counterexample_candidates": list(self.counterexample_candidates),
        }


def _verify_partial(lo: int, hi: int, table: SieveTable | None, step_limit: int) -> dict:
    simulated = skipped = 0
    candidates: list[int] = []

    def settle(n: int) -> None:
        nonlocal simulated
        simulated += 1
        try:
            stopping_profile(n, step_limit)
        except StepLimitExceeded:
            candidates.append(n)

    if hi <= _KERNEL_MAX:
        # without a table only parity filters: the bits=1 sieve keeps residue 1
        bitmap = table.bitmap if table else np.array([0, 1], dtype=np.uint8)
        bits = table.bits if table else 1
        ghi, glo = _guard()
        pos = lo
        while pos < hi:
            end, s, k = _fast.verify_block(pos, hi, bitmap, bits, ghi, glo, step_limit)
            simulated += s
            skipped += k
            pos = int(end)
            if pos < hi:
                settle(pos)
                pos += 1
    else:
        modulus = table.modulus if table else 2
        for n in range(lo, hi):
            if not n & 1 or (table and n >= modulus and not table.bitmap[n % modulus]):
                skipped += 1
            else:
                settle(n)
    return {"simulated": simulated, "skipped": skipped, "candidates": candidates}


def verify_range(
    lo: int,
    hi: int,
    table: SieveTable | None,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> VerifyReport:
    """Check every start in ``[lo, hi)`` drops below itself.

    Assumes every start below ``lo`` is already known to reach 1.  Even
    starts and sieve-skippable classes are not simulated; starts below the
    sieve modulus always are.
    """
    if lo < 2:
        raise ValueError(f"verification starts at 2 or above, got lo={lo}")
    if not lo < hi:
        raise EmptyRange(f"empty range [{lo}, {hi})")
    t0 = time.perf_counter()
    p = _verify_partial(lo, hi, table, step_limit)
    return VerifyReport(
        lo,
        hi,
        table.bits if table else 0,
        p["simulated"],
        p["skipped"],
        p["candidates"],
        time.perf_counter() - t0,
    )


# ---------------------------------------------------------------- tasks


def _parse_task(task: str) -> tuple[str, str]:
    name, _, arg = task.partition(":")
    return name, arg


def _table_for(unit: WorkUnit) -> SieveTable | None:
    return build_sieve(unit.sieve_bits) if unit.sieve_bits else None


def run_unit(unit: WorkUnit, table: SieveTable | None, step_limit: int) -> dict:
    name, arg = _parse_task(unit.task)
    if name == "verify":
        return _verify_partial(unit.lo, unit.hi, table, step_limit)
    if name == "census":
        K = int(arg)
        return census_range(unit.lo, unit.hi, K, table, step_limit, K <= FULL_LIST_MAX_K)
    if name == "records":
        rec = scan_records(unit.lo, unit.hi, arg, step_limit=step_limit)
        return {"entries": [[n, list(v) if isinstance(v, tuple) else v] for n, v in rec.entries]}
    if name == "mean":
        count, total, total_m1 = stop_sums(unit.lo, unit.hi, arg == "odd", step_limit)
        return {"count": count, "total_m": total, "total_m1": total_m1}
    raise ValueError(f"unknown task {unit.task!r}")


def _records_log(kind: str, lo: int, hi: int, partial: dict) -> RecordLog:
    entries = [(n, tuple(v) if isinstance(v, list) else v) for n, v in partial["entries"]]
    return RecordLog(kind, entries, hi)


def merge_partials(task: str, a: dict | None, b: dict, a_hi: int = 0, b_lo: int = 0) -> dict:
    """Fold partial ``b`` (the next range in plan order) into ``a``."""
    if a is None:
        return b
    name, arg = _parse_task(task)
    if name == "verify":
        return {
            "simulated": a["simulated"] + b["simulated"],
            "skipped": a["skipped"] + b["skipped"],
            "candidates": sorted(a["candidates"] + b["candidates"]),
        }
    if name == "census":
        return merge_census_partials(a, b, int(arg) <= FULL_LIST_MAX_K)
    if name == "records":
        kind = KIND_ALIASES[arg]
        merged = _records_log(kind, 0, a_hi, a).extend(_records_log(kind, b_lo, b_lo, b))
        return {"entries": [[n, list(v) if isinstance(v, tuple) else v] for n, v in merged.entries]}
    if name == "mean":
        return {k: a[k] + b[k] for k in ("count", "total_m", "total_m1")}
    raise ValueError(f"unknown task {task!r}")


def finalize(task: str, lo: int, hi: int, merged: dict, sieve_bits: int):
    name, arg = _parse_task(task)
    if name == "verify":
        return VerifyReport(
            lo, hi, sieve_bits, merged["simulated"], merged["skipped"], merged["candidates"]
        )
    if name == "census":
        K = int(arg)
        return report_from_partial(K, merged, K <= FULL_LIST_MAX_K)
    if name == "records":
        return _records_log(KIND_ALIASES[arg], lo, hi, merged)
    if name == "mean":
        return MeanStats(lo, hi, merged["count"], merged["total_m"], merged["total_m1"], arg == "odd")
    raise ValueError(f"unknown task {task!r}")


# ---------------------------------------------------------------- planning


def plan(
    lo: int,
    hi: int,
    task: str,
    chunk: int = DEFAULT_CHUNK,
    sieve_bits: int = 0,
) -> list[WorkUnit]:
    if not lo < hi:
        raise EmptyRange(f"empty range [{lo}, {hi})")
    if chunk < 1:
        raise ValueError(f"chunk must be >= 1, got {chunk}")
    if " " in task:
        raise ValueError("task names cannot contain spaces")
    return [WorkUnit(s, min(hi, s + chunk), task, sieve_bits) for s in range(lo, hi, chunk)]


# ---------------------------------------------------------------- checkpoints


def _digest(partial: dict) -> str:
    body = json.dumps(partial, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(body.encode()).hexdigest()[:16] + ":" + body


def _undigest(token: str) -> dict:
    sha, _, body = token.partition(":")
    if hashlib.sha256(body.encode()).hexdigest()[:16] != sha:
        raise CheckpointCorrupt("unit digest does not match its payload")
    try:
        return json.loads(body)
    except json.JSONDecodeError as e:
        raise CheckpointCorrupt(f"unreadable unit payload: {e}") from e


def _header(units: list[WorkUnit]) -> str:
    task = units[0].task
    if units[0].sieve_bits:
        task = f"{task}@{units[0].sieve_bits}"
    chunk = max(u.hi - u.lo for u in units)
    return f"{CKPT_MAGIC} {CKPT_VERSION} {task} {units[0].lo} {units[-1].hi} {chunk}"


@dataclass
class Checkpoint:
    header: str
    done: dict[tuple[int, int], dict] = field(default_factory=dict)

    def write(self, path: Path) -> None:
        lines = [self.header]
        lines += [f"done {lo} {hi} {_digest(p)}" for (lo, hi), p in sorted(self.done.items())]
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def read(cls, path: Path, expected_header: str, units: list[WorkUnit]) -> Checkpoint:
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointCorrupt(f"{path}: not UTF-8 text") from e
        lines = text.splitlines()
        if not lines:
            raise CheckpointCorrupt(f"{path}: empty checkpoint")
        head = lines[0].split()
        if len(head) != 6 or head[0] != CKPT_MAGIC:
            raise CheckpointCorrupt(f"{path}: not a collatz-probe checkpoint")
        if head[1] != CKPT_VERSION:
            raise CheckpointCorrupt(f"{path}: unsupported checkpoint version {head[1]}")
        if lines[0] != expected_header:
            raise CheckpointCorrupt(f"{path}: checkpoint belongs to a different plan")
        bounds = {(u.lo, u.hi) for u in units}
        ckpt = cls(lines[0])
        for line in lines[1:]:
            parts = line.split(" ")
            if len(parts) != 4 or parts[0] != "done":
                raise CheckpointCorrupt(f"{path}: malformed line {line!r}")
            try:
                key = (int(parts[1]), int(parts[2]))
            except ValueError as e:
                raise CheckpointCorrupt(f"{path}: malformed line {line!r}") from e
            if key not in bounds:
                raise CheckpointCorrupt(f"{path}: unit {key} is not part of this plan")
            ckpt.done[key] = _undigest(parts[3])
        return ckpt


# ---------------------------------------------------------------- execution


def execute(
    units: list[WorkUnit],
    workers: int = 1,
    checkpoint_path: str | Path | None = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
    stop_after: int | None = None,
):
    """Run ``units`` and return the task's merged report.

    With ``checkpoint_path`` the run resumes from, and records progress to,
    that file.  ``stop_after`` ends the run with :class:`ExecutionInterrupted`
    once that many new units have been checkpointed.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if not units:
        raise EmptyRange("empty plan")
    task, bits = units[0].task, units[0].sieve_bits
    if any(u.task != task or u.sieve_bits != bits for u in units):
        raise ValueError("all units of a plan must share task and sieve bits")
    header = _header(units)
    path = Path(checkpoint_path) if checkpoint_path else None
    ckpt = Checkpoint(header)
    if path is not None and path.exists():
        ckpt = Checkpoint.read(path, header, units)
        log.info("resuming: %d of %d units already done", len(ckpt.done), len(units))

    table = _table_for(units[0])
    pending = [u for u in units if (u.lo, u.hi) not in ckpt.done]
    t0 = time.perf_counter()
    finished = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        queue = iter(pending)
        running = {}
        for u in queue:
            running[pool.submit(run_unit, u, table, step_limit)] = u
            if len(running) >= workers:
                break
        while running:
            done, _ = wait(running, return_when=FIRST_COMPLETED)
            for fut in sorted(done, key=lambda f: running[f].lo):
                u = running.pop(fut)
                ckpt.done[(u.lo, u.hi)] = fut.result()
                finished += 1
                if path is not None:
                    ckpt.write(path)
            if stop_after is not None and finished >= stop_after:
                for fut in running:
                    fut.cancel()
                wait(running)
                for fut, u in running.items():
                    if not fut.cancelled() and fut.exception() is None:
                        ckpt.done[(u.lo, u.hi)] = fut.result()
                if path is not None:
                    ckpt.write(path)
                raise ExecutionInterrupted(f"stopped after {finished} units")
            for u in queue:
                running[pool.submit(run_unit, u, table, step_limit)] = u
                if len(running) >= workers:
                    break

    merged = None
    prev_hi = units[0].lo
    for u in units:
        merged = merge_partials(task, merged, ckpt.done[(u.lo, u.hi)], prev_hi, u.lo)
        prev_hi = u.hi
    report = finalize(task, units[0].lo, units[-1].hi, merged, bits)
    if isinstance(report, VerifyReport):
        report.wall_time = time.perf_counter() - t0
    return report
