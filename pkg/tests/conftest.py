from fractions import Fraction

import pytest

from nsroots.numeric import Precision
from nsroots.problems import polynomial_problem

# Filled by test_acceptance.py, printed at the end of the session.
ACCEPTANCE_LINES = []


@pytest.fixture
def quad():
    """f(x) = x^2 - 2 with exact rational coefficients."""
    return polynomial_problem("quad", (Fraction(-2), Fraction(0), Fraction(1)), "1.4142135623730950488", "1.5", "x^2 - 2")


@pytest.fixture
def linear():
    """f(x) = 3x - 6, root 2."""
    return polynomial_problem("lin", (Fraction(-6), Fraction(3)), "2", "5", "3x - 6")


@pytest.fixture
def p50():
    return Precision(50)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
