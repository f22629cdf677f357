import os
import sys

import pytest
from hypothesis import settings

from gevfit import GevParams, sample

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIG2_POS = GevParams(0.5, 20.0, 0.2)
FIG2_NEG = GevParams(0.5, 20.0, -0.2)


@pytest.fixture(scope="session")
def fig2_pos():
    return sample(FIG2_POS, 1000, 2024)


@pytest.fixture(scope="session")
def fig2_neg():
    return sample(FIG2_NEG, 1000, 2024)


@pytest.fixture(scope="session")
def small_pos():
    return sample(FIG2_POS, 200, 11)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
