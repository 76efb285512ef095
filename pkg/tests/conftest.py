import numpy as np
import pytest

# Registry for the acceptance criteria: test_acceptance.py records one
# entry per criterion and the summary hook prints them after the run,
# pass or fail, so the verdict survives output capture.
_CRITERIA: dict[int, tuple[str, bool, str]] = {}


def record_criterion(number: int, title: str, passed: bool, detail: str = ""):
    _CRITERIA[number] = (title, passed, detail)


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        tr.write_line(f"criterion {number:2d}: {verdict}  {title}{suffix}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
