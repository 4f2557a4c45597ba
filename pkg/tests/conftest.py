from fractions import Fraction

import pytest
from hypothesis import settings

from hzcoeff.quadfield import QuadRat
from hzcoeff.weyl import chamber_of

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

M5 = Fraction(-1, 5)


@pytest.fixture(scope="session")
def chamber5():
    return chamber_of((2, 1), M5, 5)


def q5(x, y=0):
    return QuadRat(Fraction(x), Fraction(y), 5)


ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """record(n, ok, detail) stores the outcome line for acceptance criterion n."""

    def _record(n, ok, detail, expected_failure=False):
        ACCEPTANCE[str(n)] = ("XPASS" if ok else "XFAIL") if expected_failure else ("PASS" if ok else "FAIL"), detail
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{status} criterion {n}: {detail}")
