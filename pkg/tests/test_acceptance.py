"""Acceptance criteria 1-10, each at its stated tolerance.

Each test prints one PASS/FAIL line to the terminal (also visible without -s).
Criteria 7-9 run long simulations (several minutes each).
"""
import pytest

from nswave.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
