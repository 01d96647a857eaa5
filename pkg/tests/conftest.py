import numpy as np
import pytest
from hypothesis import strategies as st

from raftgp.graph import Graph

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def graph_from_pairs(n, pairs):
    pairs = list(pairs)
    u = [a for a, _ in pairs]
    v = [b for _, b in pairs]
    return Graph.from_edges(n, u, v)


def erdos_renyi(n, p, rng):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, iu[keep], ju[keep])


def two_cliques(size, bridge=True):
    pairs = []
    for offset in (0, size):
        pairs += [(offset + i, offset + j) for i in range(size) for j in range(i + 1, size)]
    if bridge:
        pairs.append((size - 1, size))
    return graph_from_pairs(2 * size, pairs)


@pytest.fixture
def triangle():
    return graph_from_pairs(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def two_triangles():
    return graph_from_pairs(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@st.composite
def small_graphs(draw, min_nodes=1, max_nodes=12):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n))
    return graph_from_pairs(n, pairs)
