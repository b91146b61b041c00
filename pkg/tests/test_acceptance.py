"""One test per acceptance criterion.

Each result line is also collected and echoed in the terminal summary, so a
plain ``pytest`` run shows one PASS/FAIL line per criterion.
"""

import pytest

from rkocp.acceptance import CHECKS, run_check

RESULTS = []


@pytest.mark.parametrize("number", [n for n, _, _ in CHECKS],
                         ids=[f"{n:02d}-{t.replace(' ', '-')}" for n, t, _ in CHECKS])
def test_criterion(number):
    result = run_check(number)
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.detail
