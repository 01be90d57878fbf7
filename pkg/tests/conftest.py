import pytest

from contractforge import new_contract

# Populated by the acceptance suite; echoed after the run so the one-line
# verdict per criterion is always visible regardless of capture mode.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def upstream_pair():
    """The two-subsystem chain whose composition has a one-term guarantee."""
    c1 = new_contract(["i"], ["o"], ["|i| <= 2"], ["o - i <= 0", "i - 2o <= 2"])
    c2 = new_contract(["o"], ["o_p"], ["o <= 0.2", "-o <= 1"], ["o_p - o <= 0"])
    return c1, c2


@pytest.fixture
def loose_upstream(upstream_pair):
    """Same chain, but the upstream guarantee is too loose to discharge the
    downstream assumptions."""
    _, c2 = upstream_pair
    c1n = new_contract(["i"], ["o"], ["|i| <= 2"], ["|o| <= 3"])
    return c1n, c2


@pytest.fixture
def quotient_pair():
    c_top = new_contract(["i"], ["o_p"], ["|i| <= 1"], ["o_p - 2i = 1"])
    c_partial = new_contract(["i"], ["o"], ["|i| <= 2"], ["o - 2i = 0"])
    return c_top, c_partial


@pytest.fixture
def viewpoint_pair():
    funct = new_contract(["i"], ["o"], ["|i| <= 2"], ["o - 2i = 1"])
    power = new_contract(["temp"], ["P"], ["temp <= 90"], ["P <= 2.1"])
    return funct, power
