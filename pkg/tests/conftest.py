import numpy as np
import pytest
from hypothesis import strategies as st

from gossipsearch.degree import DegreeDistribution
from gossipsearch.overlay import OverlayGraph


def random_distribution(rng, max_degree=30):
    """Random finite distribution with some mass on degree >= 1."""
    top = int(rng.integers(1, max_degree + 1))
    w = rng.random(top + 1) * (rng.random(top + 1) < 0.7)
    w[int(rng.integers(1, top + 1))] += 0.1
    return DegreeDistribution(w / w.sum())


@st.composite
def distributions(draw, max_degree=25):
    top = draw(st.integers(1, max_degree))
    w = draw(st.lists(st.floats(0, 1), min_size=top + 1, max_size=top + 1))
    w = np.array(w)
    w[draw(st.integers(1, top))] += 0.05
    return DegreeDistribution(w / w.sum())


def random_graph(rng, n, p):
    """Erdos-Renyi style graph, independent of the package's wiring code."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return OverlayGraph.from_edges(n, np.column_stack([iu[keep], ju[keep]]))


def path_graph(n, holders=None):
    i = np.arange(n - 1)
    return OverlayGraph.from_edges(n, np.column_stack([i, i + 1]), holders)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance results, printed once at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
