import numpy as np
import pytest

from cornerwalk import ScaleSequence, WosParams, run_campaign

# One line per acceptance criterion, echoed after the run summary so the
# verdicts stay visible even when pytest captures stdout.
_CRITERIA_LINES = []


@pytest.fixture(scope="session")
def criteria_log():
    return _CRITERIA_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def seq_quarter():
    return ScaleSequence.constant(0.25)


@pytest.fixture(scope="session")
def seq_third():
    return ScaleSequence.constant(1.0 / 3.0)


@pytest.fixture(scope="session")
def seq_mixed():
    return ScaleSequence.explicit((0.2, 0.45, 0.3, 0.25))


@pytest.fixture(scope="session")
def table_depth4(seq_quarter):
    """One modest shared campaign; several test modules read it."""
    params = WosParams.for_depth(seq_quarter, 4)
    return run_campaign(seq_quarter, params, 120_000, seed=4242)


@pytest.fixture(scope="session")
def rng_np():
    return np.random.default_rng(20240817)
