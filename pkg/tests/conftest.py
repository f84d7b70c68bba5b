import json
from pathlib import Path

import pytest
from hypothesis import settings

from exjacobi.darboux import reference_family

settings.register_profile("suite", deadline=None, max_examples=40)
settings.load_profile("suite")

GOLDEN = Path(__file__).parent / "golden" / "calibration.json"

# filled by test_acceptance.report(); echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def golden():
    return json.loads(GOLDEN.read_text())


@pytest.fixture(scope="session")
def F1():
    return reference_family("F1")


@pytest.fixture(scope="session")
def F2():
    return reference_family("F2")


@pytest.fixture(scope="session")
def F3():
    return reference_family("F3")


@pytest.fixture(scope="session")
def F4():
    return reference_family("F4")


@pytest.fixture(scope="session")
def trivial():
    return reference_family("trivial")


@pytest.fixture(scope="session")
def legendre():
    return reference_family("legendre")
