import pytest

from hermdeg.hermitian import HermitianMatrix
from hermdeg.quadfield import make_field

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def gauss():
    return make_field(-4)


@pytest.fixture(scope="session")
def eisenstein_field():
    return make_field(-3)


@pytest.fixture
def diag(gauss):
    return lambda *v: HermitianMatrix.diag(gauss, v)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
