import numpy as np
import pytest

from ncgdist.algebra import Algebra, State


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def c2_points():
    alg = Algebra((1, 1))
    return State.pure(alg, 0, [1]), State.pure(alg, 1, [1])


def graph_points(N):
    alg = Algebra((1,) * N)
    return [State.pure(alg, i, [1]) for i in range(N)]


# one line per acceptance criterion, echoed after the run even when output is captured
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0][1:])):
            terminalreporter.write_line(line)
