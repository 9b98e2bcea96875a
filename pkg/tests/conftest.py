import numpy as np
import pytest

from ztdyn import couplings


@pytest.fixture
def k3():
    return couplings.sample_constant(3, 1)


@pytest.fixture
def bully4():
    """Two disjoint bully pairs {0,1} and {2,3} on a weak background."""
    a = np.full((4, 4), 0.1)
    a[0, 1] = a[1, 0] = 10.0
    a[2, 3] = a[3, 2] = 10.0
    np.fill_diagonal(a, 0)
    return couplings.from_array(a)


@pytest.fixture
def two_triangles():
    a = np.zeros((6, 6), dtype=int)
    for block in ((0, 1, 2), (3, 4, 5)):
        for i in block:
            for j in block:
                if i != j:
                    a[i, j] = 1
    return couplings.from_array(a)


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion; returns the verdict."""

    def record(number, title, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}  {title}  [{detail}]"
        _ACCEPTANCE.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
