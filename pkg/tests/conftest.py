import os

import pytest

from shadowaudit.binding import load_bindings
from shadowaudit.shadow.parser import load_model
from shadowaudit.workbook import load_workbook

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_workbook():
    return load_workbook(os.path.join(FIXTURES, "workbook.wbk"))


@pytest.fixture(scope="session")
def fixture_model():
    return load_model(os.path.join(FIXTURES, "model.sdl"))


@pytest.fixture(scope="session")
def fixture_bindings(fixture_model):
    return load_bindings(os.path.join(FIXTURES, "bindings.bnd"), fixture_model)


@pytest.fixture(scope="session")
def fixture_data_path():
    return os.path.join(FIXTURES, "model_data.dat")


def mutant_path(name):
    return os.path.join(FIXTURES, "mutants", f"{name}.wbk")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion, when that suite ran."""
    results = []
    try:
        import test_acceptance
        results = test_acceptance.RESULTS
    except ImportError:
        pass
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
