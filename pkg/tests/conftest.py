import pytest

from newtongup.constants import CODATA, TwoBodySystem
from newtongup.spectra import CutoffCoulomb, Grid, SquareWell

HBAR_C = CODATA.hbar_c
NUCLEON = 938.272


@pytest.fixture(scope="session")
def nucleon_pair():
    return TwoBodySystem(NUCLEON, NUCLEON)


@pytest.fixture(scope="session")
def well():
    return SquareWell(50.0, 2.0)


@pytest.fixture(scope="session")
def unit_tail():
    return CutoffCoulomb(-HBAR_C, 2.0)


@pytest.fixture(scope="session")
def small_grid():
    return Grid(20.0, 600)


# One line per acceptance criterion, filled in by test_acceptance.py.
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
