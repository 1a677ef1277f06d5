"""The ten acceptance criteria, each at its stated scale and tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line
per criterion, or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import subprocess
import sys
import time

import pytest

from stablelab.suites import run_suite

MAX_BASE = 4


def _line(n: int, title: str, ok: bool, detail: str) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title} ({detail})"


def _suites(*names):
    reports = [run_suite(name, MAX_BASE) for name in names]
    ok = all(r.passed for r in reports)
    detail = "; ".join(
        f"{r.suite}: {r.checks} checks, {r.failures} failures, {r.duration:.1f}s" for r in reports
    )
    return ok, detail, reports


def criterion_1():
    ok, detail, (r,) = _suites("filtering")
    return ok and r.duration < 300, detail


def criterion_2():
    ok, detail, _ = _suites("stable-vs-algebraic")
    return ok, detail


def criterion_3():
    ok, detail, _ = _suites("upset-embedding")
    return ok, detail


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "stablelab", *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout


def criterion_4():
    ok, detail, _ = _suites("countermodels")
    codes = {}
    for formula in ("((p->q)->p)->p", "p | ~p", "p -> p", "bot -> p"):
        first = _cli("search", formula)
        again = _cli("search", formula)
        codes[formula] = first[0]
        ok = ok and first == again
        if first[0] == 0:
            ok = ok and first[1].startswith("world: ") and first[1].count('"elements"') == 1
    ok = ok and codes == {"((p->q)->p)->p": 0, "p | ~p": 0, "p -> p": 1, "bot -> p": 1}
    return ok, f"{detail}; exit codes {list(codes.values())}"


def criterion_5():
    ok, detail, (r,) = _suites("adjunction")
    return ok and r.duration < 600, detail


def criterion_6():
    ok, detail, _ = _suites("bimodule-roundtrip")
    return ok, detail


def criterion_7():
    ok, detail, _ = _suites("scott-extension")
    return ok, detail


def criterion_8():
    ok, detail, reports = _suites("duality", "johnstone")
    return ok and "orientation" in reports[1].notes[0], detail


def criterion_9():
    ok, detail, _ = _suites("fragment-agreement")
    return ok, detail


def criterion_10():
    ok, detail, (r,) = _suites("parser-roundtrip")
    return ok and r.instances == 10_000, detail


CRITERIA = [
    (1, "forcing sets are filters", criterion_1),
    (2, "forcing agrees with filter evaluation", criterion_2),
    (3, "upset model matches Heyting evaluation", criterion_3),
    (4, "countermodels reproduced deterministically", criterion_4),
    (5, "modal adjunction on filters", criterion_5),
    (6, "modal embedding squares commute", criterion_6),
    (7, "Scott extension laws", criterion_7),
    (8, "stable-map duality and coherent reconstruction", criterion_8),
    (9, "fragment agreement with Kripke forcing", criterion_9),
    (10, "parser round trip", criterion_10),
]


@pytest.mark.parametrize("n, title, check", CRITERIA, ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(n, title, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(n, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    start = time.perf_counter()
    results = []
    for n, title, check in CRITERIA:
        ok, detail = check()
        results.append(ok)
        print(_line(n, title, ok, detail), flush=True)
    print(f"{sum(results)}/{len(results)} criteria passed in {time.perf_counter() - start:.0f}s")
    sys.exit(0 if all(results) else 1)
