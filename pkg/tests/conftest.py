import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from collatz_probe.sieve import build_sieve  # noqa: E402


@pytest.fixture(scope="session")
def sieve16():
    return build_sieve(16)


@pytest.fixture(scope="session")
def sieve8():
    return build_sieve(8)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def check():
    """Record one pass/fail line per acceptance sub-check; call .done() to fail."""
    failures = []

    def _check(label: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        if not ok:
            failures.append(line)
        return ok

    def note(label: str) -> None:
        ACCEPTANCE_LINES.append(f"[NOTE] {label}")
        print(f"[NOTE] {label}")

    def done() -> None:
        assert not failures, "\n".join(failures)

    _check.note = note
    _check.done = done
    return _check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
