import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from kglf.fixtures import build_f1, build_f2

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture
def f1():
    return build_f1()


@pytest.fixture
def f2():
    return build_f2()


def pytest_terminal_summary(terminalreporter):
    """Echo the release-gate verdicts after capture is torn down so they
    always land in the terminal log, capture mode notwithstanding."""
    try:
        import test_acceptance
    except ImportError:
        return
    lines = getattr(test_acceptance, "VERDICT_LINES", [])
    if not lines:
        return
    terminalreporter.section("release gates")
    for line in lines:
        terminalreporter.write_line(line)
