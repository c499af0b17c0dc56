"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints a single ``[PASS]`` or ``[FAIL]`` line and asserts the
outcome; the lines are repeated together at the end of the pytest summary.
"""
import pytest
from conftest import ACCEPTANCE_LINES

from dlaguerre import validation

pytestmark = pytest.mark.acceptance

CRITERIA = [
    pytest.param(c, id=f"criterion_{c:02d}",
                 marks=[pytest.mark.slow] if c == 1 else [])
    for c in sorted(validation.CHECKS)
]


@pytest.mark.parametrize("criterion", CRITERIA)
def test_acceptance_criterion(criterion):
    result = validation.run_check(criterion, tol=1e-9, seed=0)
    print(result.line())
    ACCEPTANCE_LINES.append(result.line())
    assert result.passed, result.line()
