"""Acceptance battery: one printed pass/fail line per criterion.

Tolerances live in ``xnet.suite`` and are not relaxed here. Run with
``pytest tests/test_acceptance.py -v -s`` to see the lines inline; they are
also printed when capture is on, through ``capsys.disabled``.
"""

import pytest

from xnet.suite import CRITERIA, summary_line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number](0)
    with capsys.disabled():
        print("\n" + summary_line(result))
        for check in result.checks:
            print(f"    [{'ok' if check.passed else 'FAIL'}] {check.name}  {check.detail}")
    assert result.passed, summary_line(result)
