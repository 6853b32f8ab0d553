import numpy as np
import pytest

from ccspin.catalog import M4_STAR, equilateral_configuration
from ccspin.ccfind import cc_from_config, classify, solve_cc
from ccspin.core import MassedConfiguration
from ccspin.frame import build_chart

S3 = np.sqrt(3.0)
TRIANGLE = [-S3 / 2, -0.5, S3 / 2, -0.5, 0.0, 1.0]

ACCEPTANCE_LINES: dict = {}


def chart_for(masses, x):
    cc = solve_cc(MassedConfiguration(masses, x))
    rep = classify(cc)
    return build_chart(rep)


@pytest.fixture(scope="session")
def lagrange_chart():
    return chart_for([1, 1, 1], TRIANGLE)


@pytest.fixture(scope="session")
def lagrange123_chart():
    return chart_for([1, 2, 3], TRIANGLE)


@pytest.fixture(scope="session")
def degenerate_report():
    return classify(cc_from_config(equilateral_configuration(M4_STAR)))


@pytest.fixture(scope="session")
def degenerate_chart(degenerate_report):
    return build_chart(degenerate_report)


@pytest.fixture(scope="session")
def acceptance():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
