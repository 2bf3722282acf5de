import sys

import pytest

from lawvere.catalogue import (ab_theory, boole_theory, cantor_theory, groups_theory,
                               gsets_theory, sets_theory)
from lawvere.groups import named_group


@pytest.fixture
def E():
    return sets_theory()


@pytest.fixture
def boole():
    return boole_theory()


@pytest.fixture
def cantor2():
    return cantor_theory(2)


@pytest.fixture
def groups():
    return groups_theory()


@pytest.fixture
def ab():
    return ab_theory()


@pytest.fixture
def c2sets():
    return gsets_theory(named_group("C2"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
