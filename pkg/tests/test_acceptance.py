"""Acceptance criteria 1-14, one test and one printed line each.

Criterion 14 needs EQCSM_HEAVY=1 (a few minutes of CPU).
"""

import pytest

from eqcsm.acceptance import CRITERIA, heavy_enabled, run_criterion


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"c{c.number:02d}-{c.suite}" for c in CRITERIA])
def test_criterion(criterion, capsys):
    if criterion.heavy and not heavy_enabled():
        with capsys.disabled():
            print(f"\n[SKIP] {criterion.number:2d} {criterion.name}: set EQCSM_HEAVY=1")
        pytest.skip("heavy criterion; set EQCSM_HEAVY=1")
    result = run_criterion(criterion)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.ok, result.line()


def test_numbering_is_complete():
    assert [c.number for c in CRITERIA] == list(range(1, 15))
