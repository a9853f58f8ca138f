"""Runs every acceptance criterion at its stated tolerance.

Each test prints one PASS/FAIL line; run with ``-s`` to see them inline.
"""

import pytest

from distopt.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.summary
