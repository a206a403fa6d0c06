import numpy as np
import pytest

from daopf.case_io import Branch, Bus, Generator, NetworkCase, load_case, validate_case
from daopf.scheduler import default_config_path, load_config, run_schedule

ACCEPTANCE_LINES = []


def two_bus_case(cost=10.0, cap=200.0, p_max=300.0, p_min=0.0):
    case = NetworkCase(
        buses=(Bus(1, 0.0), Bus(2, 1.0)),
        branches=(Branch(1, 1, 2, 0.1, cap),),
        generators=(Generator(1, 1, p_min, p_max, 1000.0, 1000.0, cost),),
        name="two-bus",
    )
    validate_case(case)
    return case


def three_bus_congested():
    """Cheap generator at bus 1, dear one at bus 3, load at bus 2; line 1-2 binds."""
    case = NetworkCase(
        buses=(Bus(1, 0.0), Bus(2, 1.0), Bus(3, 0.0)),
        branches=(Branch(1, 1, 2, 0.1, 60.0), Branch(2, 2, 3, 0.1, 500.0), Branch(3, 1, 3, 0.1, 500.0)),
        generators=(Generator(1, 1, 0.0, 300.0, 1e3, 1e3, 10.0), Generator(2, 3, 0.0, 300.0, 1e3, 1e3, 30.0)),
        name="three-bus",
    )
    validate_case(case)
    return case


@pytest.fixture(scope="session")
def config():
    return load_config(default_config_path())


@pytest.fixture(scope="session")
def ieee30(config):
    return load_case(config.case_path)


@pytest.fixture(scope="session")
def schedule(config):
    return run_schedule(config)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
