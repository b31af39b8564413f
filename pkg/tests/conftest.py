from __future__ import annotations

import pytest

from statdiff import parse_distribution

# distributions used across several test modules
SUITE = ["uniform(0,1)", "normal(0,1)", "exponential(2)", "discrete(1:0.5,3:0.5)",
         "density(2*x; 0, 1)"]
SYMMETRIC = ["normal(0,1)", "uniform(0,1)", "discrete(0:0.3,0.5:0.4,1:0.3)"]


@pytest.fixture(params=SUITE)
def suite_dist(request):
    return parse_distribution(request.param)


# One line per acceptance criterion, printed at the end of the run regardless
# of output capturing. Filled in by tests/test_acceptance.py.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # lets the acceptance fixture see whether the test body failed
    outcome = yield
    if call.when == "call":
        item._call_failed = outcome.get_result().failed
