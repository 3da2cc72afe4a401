import numpy as np
import pytest

from gsk_asymptotics.cauchy import build_cauchy_data
from gsk_asymptotics.kernels import boson_kernel, entire_test_kernel, xxz_kernel
from gsk_asymptotics.quadrature import truncated_line_rule

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def boson():
    return boson_kernel(1.0, 1.0, 0.5)


@pytest.fixture(scope="session")
def boson_rule():
    return truncated_line_rule(8.0, 32, 20)


@pytest.fixture(scope="session")
def boson_data(boson, boson_rule):
    return build_cauchy_data(boson, boson_rule)


@pytest.fixture(scope="session")
def oracle_rule():
    # finer and wider than the Cauchy-data rule so the two are independent
    return truncated_line_rule(10.0, 60, 24)


@pytest.fixture(scope="session")
def entire():
    return entire_test_kernel(0.5, 1.0)


@pytest.fixture(scope="session")
def entire_data(entire):
    return build_cauchy_data(entire, truncated_line_rule(6.0, 24, 20))


@pytest.fixture(scope="session")
def xxz1():
    return xxz_kernel(1.0)


@pytest.fixture(scope="session")
def xxz_rule():
    return truncated_line_rule(40.0, 48, 20)


@pytest.fixture(scope="session")
def xxz1_data(xxz1, xxz_rule):
    return build_cauchy_data(xxz1, xxz_rule)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
