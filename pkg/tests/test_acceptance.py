"""Acceptance criteria 1-10, one test each; run with ``-s`` to see the PASS/FAIL lines."""
import pytest

from gentlecm.selftest import CHECKS

# wall-clock bounds in seconds; None where only correctness is required
LIMITS = {1: 1, 2: 1, 3: 1, 4: 120, 5: 60, 6: 60, 7: None, 8: None, 9: 60, 10: None}


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i}" for i in range(1, len(CHECKS) + 1)])
def test_criterion(check):
    r = check()
    print(r.line())
    assert r.passed, r.line()
    limit = LIMITS[r.number]
    assert limit is None or r.seconds < limit, f"criterion {r.number} took {r.seconds:.1f}s"


def test_all_criteria_present():
    assert len(CHECKS) == len(LIMITS) == 10
