from fractions import Fraction
from itertools import product

import pytest

ACCEPTANCE_LINES: list[str] = []


def bernoulli_chain_law(m, n):
    """Degree law of node m at time n by enumerating every 0/1 outcome path."""
    law = {}
    for path in product((0, 1), repeat=n - m):
        degree, prob = 1, Fraction(1)
        for t, y in zip(range(m + 1, n + 1), path):
            q = Fraction(degree, 2 * t - 1)
            prob *= q if y else 1 - q
            degree += y
        law[degree] = law.get(degree, Fraction(0)) + prob
    return law


@pytest.fixture
def chain_law():
    return bernoulli_chain_law


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
