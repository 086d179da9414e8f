import time

import pytest

_RESULTS: dict = {}
_START = {}


def pytest_sessionstart(session):
    _START["t"] = time.perf_counter()


class CriterionRecorder:
    def __call__(self, number: int, title: str, checks: list[tuple[str, bool]]):
        ok = all(passed for _, passed in checks)
        failed = [name for name, passed in checks if not passed]
        detail = "; ".join(name for name, _ in checks) if ok else "failed: " + "; ".join(failed)
        _RESULTS[number] = (ok, title, detail)
        assert ok, f"criterion {number} ({title}) " + detail


@pytest.fixture
def criterion():
    return CriterionRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    elapsed = time.perf_counter() - _START.get("t", time.perf_counter())
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        ok, title, detail = _RESULTS[n]
        if n == 8:
            within = elapsed < 60.0
            ok = ok and within
            detail += f"; suite runtime {elapsed:.1f}s {'<' if within else '>='} 60s"
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} -- {detail}")
