"""Acceptance criteria 1 to 14; each test prints its one-line verdict."""

import time

import pytest

from krein.acceptance import CRITERIA

BUDGET_SECONDS = {1: 1.0, 9: 10.0, 10: 60.0}
SUITE_BUDGET = 300.0
_elapsed = {}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    t0 = time.perf_counter()
    res = CRITERIA[number]()
    res.seconds = time.perf_counter() - t0
    _elapsed[number] = res.seconds
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.summary
    if number in BUDGET_SECONDS:
        assert res.seconds < BUDGET_SECONDS[number], f"took {res.seconds:.1f} s"


def test_suite_runtime(capsys):
    if len(_elapsed) < len(CRITERIA):
        pytest.skip("needs the full criterion run in the same session")
    total = sum(_elapsed.values())
    with capsys.disabled():
        print(f"\nselftest total {total:.1f} s (budget {SUITE_BUDGET:.0f} s)")
    assert total < SUITE_BUDGET
