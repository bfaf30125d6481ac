"""``collatz-probe`` command line.

Exit codes: 0 success, 1 usage error, 2 counterexample candidate found,
3 checkpoint corruption.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import census as census_mod
from . import heuristics
from .core import StepLimitExceeded, flight_profile, oe_ratio, render_fraction, stopping_profile
from .records import KIND_ALIASES, verify_known_records
from .report import kv_line, to_json
from .runner import (
    DEFAULT_CHUNK,
    DEFAULT_SIEVE_BITS,
    CheckpointCorrupt,
    EmptyRange,
    execute,
    plan,
)
from .sieve import build_sieve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CANDIDATE = 2
EXIT_CKPT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _nat(value: str) -> int:
    try:
        n = int(value, 10)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a decimal integer, got {value!r}") from e
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _emit(lines: list[str]) -> None:
    sys.stdout.write("".join(line + "\n" for line in lines))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="collatz-probe", description="Collatz verification and census toolkit")
    p.add_argument("--step-limit", type=_nat, default=10**6)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    for name in ("flight", "stop", "ratio"):
        sp = sub.add_parser(name)
        sp.add_argument("n", type=_nat)

    sp = sub.add_parser("sieve")
    sp.add_argument("--bits", type=_nat, required=True)
    sp.add_argument("--list", action="store_true")

    sp = sub.add_parser("census")
    sp.add_argument("--k", type=_nat)
    sp.add_argument("--sieve-bits", type=_nat)
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--workers", type=_nat, default=1)
    sp.add_argument("--json", action="store_true")
    csub = sp.add_subparsers(dest="census_cmd", parser_class=_Parser)
    tp = csub.add_parser("trend")
    tp.add_argument("--kmax", type=_nat, required=True)
    tp.add_argument("--sieve-bits", type=_nat)
    tp.add_argument("--json", action="store_true")

    sp = sub.add_parser("records")
    sp.add_argument("--kind", choices=sorted(KIND_ALIASES))
    sp.add_argument("--upto", type=_nat)
    sp.add_argument("--workers", type=_nat, default=1)
    rsub = sp.add_subparsers(dest="records_cmd", parser_class=_Parser)
    rsub.add_parser("verify-known")

    sp = sub.add_parser("heuristics")
    hsub = sp.add_subparsers(dest="heur_cmd", required=True, parser_class=_Parser)
    dp = hsub.add_parser("drift")
    dp.add_argument("--terms", type=_nat, required=True)
    dp.add_argument("--precision", type=_nat, default=30)
    mp = hsub.add_parser("mean")
    mp.add_argument("--from", dest="lo", type=_nat, required=True)
    mp.add_argument("--to", dest="hi", type=_nat, required=True)
    mp.add_argument("--odd-only", action="store_true")
    mp.add_argument("--workers", type=_nat, default=1)
    hp = hsub.add_parser("heightprobe")
    hp.add_argument("--upto", type=_nat, required=True)
    hp.add_argument("--k", type=_nat, required=True)

    sp = sub.add_parser("verify")
    sp.add_argument("--from", dest="lo", type=_nat, required=True)
    sp.add_argument("--to", dest="hi", type=_nat, required=True)
    sp.add_argument("--sieve-bits", type=int, default=DEFAULT_SIEVE_BITS)
    sp.add_argument("--workers", type=_nat, default=1)
    sp.add_argument("--checkpoint")
    sp.add_argument("--chunk", type=_nat, default=DEFAULT_CHUNK)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--timing", action="store_true", help="append wall time (not deterministic)")
    return p


def _cmd_flight(a) -> int:
    p = flight_profile(a.n, a.step_limit)
    _emit([kv_line(start=p.start, route=p.route, max_height=p.max_height,
                   odd_count=p.odd_count, even_count=p.even_count)])
    return EXIT_OK


def _cmd_stop(a) -> int:
    p = stopping_profile(a.n, a.step_limit)
    if not p.defined:
        _emit([kv_line(start=p.start, defined=False)])
    else:
        _emit([kv_line(start=p.start, m=p.m, m1=p.m1, m2=p.m2, landing=p.landing, defined=True)])
    return EXIT_OK


def _cmd_ratio(a) -> int:
    if a.n < 2:
        raise UsageError("ratio needs n >= 2")
    r = oe_ratio(a.n, a.step_limit)
    _emit([kv_line(start=a.n, odd_count=r.odd_count, even_count=r.even_count,
                   ratio=r.value, decimal=r.decimal(6), below_log2_log3=r.below_log_bound())])
    return EXIT_OK


def _cmd_sieve(a) -> int:
    if a.bits > 24:
        raise UsageError("sieve bits must be <= 24")
    t = build_sieve(a.bits)
    pct = render_fraction(t.coverage * 100, 4)
    lines = [kv_line(bits=t.bits, survivors=len(t.survivors), coverage=t.coverage,
                     coverage_percent=pct)]
    if a.list:
        lines += [str(r) for r in t.survivors]
    _emit(lines)
    return EXIT_OK


def _census_lines(rep, with_list: bool) -> list[str]:
    lines = [kv_line(report="census", K=rep.K, population=rep.population, x=rep.x,
                     max_m2=rep.max_m2, premise_holds=rep.premise_holds,
                     violators_complete=rep.violators_complete)]
    if with_list:
        lines += [kv_line(violator=v) for v in rep.violators_sample]
    return lines


def _cmd_census(a) -> int:
    if a.census_cmd == "trend":
        if a.kmax > census_mod.MAX_K:
            raise UsageError(f"--kmax must be <= {census_mod.MAX_K}")
        table = build_sieve(a.sieve_bits) if a.sieve_bits else None
        tr = census_mod.trend(a.kmax, table, a.step_limit)
        if a.json:
            _emit([to_json({"levels": tr.levels, "growth_ratios": tr.growth_ratios,
                            "tier1": tr.tier1, "tier2": tr.tier2, "tier3": tr.tier3})])
            return EXIT_OK
        lines = [kv_line(report="trend", kmax=a.kmax, tier=tr.tier, tier1=tr.tier1,
                         tier2=tr.tier2, tier3=tr.tier3, window=tr.window)]
        ratios = dict(tr.growth_ratios)
        for K, x in tr.levels:
            fields = {"K": K, "x": x}
            if K - 1 in ratios:
                fields["growth"] = render_fraction(ratios[K - 1], 6)
            lines.append(kv_line(**fields))
        _emit(lines)
        return EXIT_OK
    if a.k is None:
        raise UsageError("census needs --k K (or the 'trend' subcommand)")
    if a.k > census_mod.MAX_K:
        raise UsageError(f"--k must be <= {census_mod.MAX_K}")
    if a.sieve_bits and a.sieve_bits > a.k:
        raise UsageError("--sieve-bits must not exceed --k")
    units = plan(2, 1 << a.k, f"census:{a.k}", DEFAULT_CHUNK, a.sieve_bits or 0) if a.k > 1 else []
    if units:
        rep = execute(units, a.workers, step_limit=a.step_limit)
    else:
        rep = census_mod.census(a.k)
    if a.json:
        _emit([to_json({"K": rep.K, "population": rep.population, "x": rep.x,
                        "max_m2": rep.max_m2, "premise_holds": rep.premise_holds,
                        "violators_sample": rep.violators_sample})])
    else:
        _emit(_census_lines(rep, a.list))
    return EXIT_OK


def _cmd_records(a) -> int:
    if a.records_cmd == "verify-known":
        checks = verify_known_records(a.step_limit)
        _emit([kv_line(n=c.n, metric=c.metric, expected=c.expected, computed=c.computed,
                       match=c.match) for c in checks])
        return EXIT_OK if all(c.match for c in checks) else EXIT_CANDIDATE
    if a.kind is None or a.upto is None:
        raise UsageError("records needs --kind and --upto (or 'verify-known')")
    kind = KIND_ALIASES[a.kind]
    log = execute(plan(1, a.upto + 1, f"records:{kind}", DEFAULT_CHUNK), a.workers,
                  step_limit=a.step_limit)
    _emit(log.lines())
    return EXIT_OK


def _cmd_heuristics(a) -> int:
    if a.heur_cmd == "drift":
        if a.precision < 10:
            raise UsageError("--precision must be >= 10")
        d = heuristics.drift_constant(a.terms, a.precision)
        import mpmath

        _emit([kv_line(terms=d.terms, product=mpmath.nstr(d.product, a.precision),
                       closed_form=mpmath.nstr(d.closed_form, a.precision), agree=d.agree())])
    elif a.heur_cmd == "mean":
        if not 2 <= a.lo < a.hi:
            raise UsageError("need 2 <= --from < --to")
        task = "mean:odd" if a.odd_only else "mean"
        s = execute(plan(a.lo, a.hi, task, DEFAULT_CHUNK), a.workers, step_limit=a.step_limit)
        _emit([kv_line(lo=s.lo, hi=s.hi, odd_only=s.odd_only, count=s.count,
                       mean=s.decimal(6), mean_m1=render_fraction(s.mean_m1, 6),
                       wagon_constant="9.477955")])
    else:
        pr = heuristics.height_bound_probe(a.upto, a.k, a.step_limit)
        lines = [kv_line(upto=pr.upto, K=pr.K_const, violations=len(pr.violations),
                         argmax=pr.argmax, max_ratio=render_fraction(pr.max_ratio, 6))]
        lines += [kv_line(n=n, max_height=h, bound=b) for n, h, b in pr.violations]
        _emit(lines)
    return EXIT_OK


def _cmd_verify(a) -> int:
    if a.lo < 2:
        raise UsageError("--from must be >= 2")
    if not 0 <= a.sieve_bits <= 24:
        raise UsageError("--sieve-bits must be in [0, 24]")
    units = plan(a.lo, a.hi, "verify", a.chunk, a.sieve_bits)
    rep = execute(units, a.workers, a.checkpoint, a.step_limit)
    if a.json:
        _emit([to_json(rep.as_dict())])
    else:
        _emit(rep.lines())
    if a.timing:
        print(kv_line(wall_time=f"{rep.wall_time:.3f}"), file=sys.stderr)
    return EXIT_CANDIDATE if rep.counterexample_candidates else EXIT_OK


COMMANDS = {
    "flight": _cmd_flight,
    "stop": _cmd_stop,
    "ratio": _cmd_ratio,
    "sieve": _cmd_sieve,
    "census": _cmd_census,
    "records": _cmd_records,
    "heuristics": _cmd_heuristics,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.cmd](args)
    except (UsageError, EmptyRange) as e:
        print(f"collatz-probe: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointCorrupt as e:
        print(f"collatz-probe: checkpoint corrupt: {e}", file=sys.stderr)
        return EXIT_CKPT
    except StepLimitExceeded as e:
        print(f"collatz-probe: counterexample candidate: {e}", file=sys.stderr)
        return EXIT_CANDIDATE


if __name__ == "__main__":
    sys.exit(main())
