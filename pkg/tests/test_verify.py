import numpy as np
import pytest

from nswave.verify import FAST_PROPERTIES, verify_suite


@pytest.fixture(scope="module")
def fast_report():
    return verify_suite("fast")


def test_fast_suite_passes(fast_report):
    assert fast_report.passed, "\n".join(fast_report.lines())
    assert [e.name for e in fast_report.entries] == list(FAST_PROPERTIES)


def test_report_lines(fast_report):
    lines = list(fast_report.lines())
    assert len(lines) == len(FAST_PROPERTIES)
    assert all(ln.startswith("[PASS] ") for ln in lines)


def test_tampered_kernel_is_caught():
    # A kernel that goes negative for s slightly above 1.
    rep = verify_suite("fast", overrides={"phi": lambda s: (s - 1.0) - 2.0 * np.log(s)})
    failed = {e.name for e in rep.entries if not e.passed}
    assert not rep.passed
    assert failed == {"phi_nonnegativity"}


def test_crashing_property_is_a_failure():
    def boom(ctx):
        raise RuntimeError("kaput")

    rep = verify_suite("fast", overrides={"boom": boom})
    entry = next(e for e in rep.entries if e.name == "boom")
    assert not entry.passed and "kaput" in entry.detail


def test_unknown_level():
    with pytest.raises(ValueError):
        verify_suite("medium")
