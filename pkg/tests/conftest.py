import numpy as np
import pytest

from smallcell_market import MarketParams

ACCEPTANCE_FILE = "test_acceptance.py"


@pytest.fixture
def base_params():
    return MarketParams(alpha=0.5, n_mobile=50, n_fixed=50, r0=50, lambda_s=2)


@pytest.fixture
def reg_params():
    return MarketParams(alpha=0.5, n_mobile=50, n_fixed=50, r0=50, lambda_s=4)


@pytest.fixture
def rng():
    return np.random.default_rng(20161016)


_acceptance = {}


def pytest_runtest_logreport(report):
    if ACCEPTANCE_FILE in report.nodeid and report.when == "call":
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome
    elif ACCEPTANCE_FILE in report.nodeid and report.when == "setup" and report.failed:
        _acceptance[report.nodeid.split("::")[-1]] = "error"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
