import random
from fractions import Fraction as F

import pytest

from qfock import stepfn


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture
def quarter():
    return stepfn.from_intervals([(0, 1, F(1, 4))])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
