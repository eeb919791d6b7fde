"""Acceptance gate: one PASS/FAIL line per criterion, at the contracted tolerances.

Criterion 9 is expected to fail: with the reference coupling the atomic-loss
rate of the contract already violates the bound (see the decisions ledger).
It is marked as a strict expected failure, so an unexpected pass is reported.
"""

import pytest

from countstats import acceptance

KNOWN_FAILURES = {
    9: "at g/2pi=10 MHz the non-adjusted ratio is 1.29 at gamma/2pi=3 MHz; the no-violation claim does not hold",
}


def _param(check):
    marks = []
    if check.number in KNOWN_FAILURES:
        marks.append(pytest.mark.xfail(reason=KNOWN_FAILURES[check.number], strict=True))
    return pytest.param(check, id=f"criterion_{check.number:02d}", marks=marks)


@pytest.mark.parametrize("check", [_param(c) for c in acceptance.CHECKS])
def test_criterion(check):
    result = check()
    print("\n" + result.line())
    assert result.passed, result.detail
