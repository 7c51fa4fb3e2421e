import pytest

from rigidlab.field import build_field
from rigidlab.action import build_action
from rigidlab.specfile import load_preset

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def octic():
    return load_preset("octic")


@pytest.fixture(scope="session")
def cubic():
    return load_preset("cubic-cartan")


@pytest.fixture(scope="session")
def quad():
    field = build_field([1, 0, -2])
    return build_action(field, [field.element([-1, 1])])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
