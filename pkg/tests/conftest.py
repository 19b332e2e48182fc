from pathlib import Path

import pytest
from hypothesis import settings

from supermouse.cm2 import parse_cm

FIXTURES = Path(__file__).parent / "fixtures"

FIXTURE_PATTERNS = [
    "(ENN)*6",
    "(ENNENNN)*2",
    "(ENNN)*3",
    "(ENENN)*6",
    "((EN)*5NNN)*2",
    "((EN)*3NN)*3",
]

HAND_MACHINES = ["inc_transfer", "doubling", "all_updates", "transfer_loop", "count3", "immediate_halt"]


def walk(letters, x, start_state=0):
    """Coordinate-level oracle: move on (x, y) until y == x.

    Deliberately independent of the gap arithmetic used in the package.
    Returns (x', entered state, steps) or None after a generous bound.
    """
    px, py = x, 0
    n = len(letters)
    state = start_state
    for steps in range(1, 10_000 * (x + n) + 1):
        if letters[state] == "E":
            px += 1
        else:
            py += 1
        state = (state + 1) % n
        if px == py:
            return px, state, steps
    return None


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def load_machine(name):
    return parse_cm((FIXTURES / f"{name}.cm").read_text())


@pytest.fixture
def machine():
    return load_machine


settings.register_profile("default", deadline=None)
settings.load_profile("default")


# -- acceptance summary ------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA[marker] = "PASS" if report.outcome == "passed" else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        report.criterion = m.args


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), verdict in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
