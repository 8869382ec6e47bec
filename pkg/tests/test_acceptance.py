"""Acceptance criteria at their stated tolerances, one test per criterion.

Each test runs the catalog experiment that owns the criterion with its default
parameters and prints one PASS/FAIL line. Run with ``pytest -s`` to see them.
Full runtime is a few minutes on one core.
"""

import functools

import pytest

from rwrs.experiments import CATALOG, ExperimentSpec, run

OWNER = {c: e.id for e in CATALOG.values() for c in e.criteria}


@functools.lru_cache(maxsize=None)
def result(eid):
    return run(ExperimentSpec(eid))


@pytest.mark.parametrize("criterion", sorted(OWNER))
def test_criterion(criterion):
    checks = [c for c in result(OWNER[criterion]).checks if c.criterion == criterion]
    assert checks, f"no checks recorded for criterion {criterion}"
    required = [c for c in checks if c.required]
    ok = all(c.passed for c in required)
    detail = "; ".join(f"{c.label}: {c.detail}" for c in required if not c.passed) or f"{len(required)} checks"
    print(f"\n{'PASS' if ok else 'FAIL'} [{criterion}] {OWNER[criterion]} {detail}")
    for c in checks:
        print("   " + c.line())
    assert ok, detail
