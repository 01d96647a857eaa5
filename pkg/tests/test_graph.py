import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raftgp.graph import (
    Graph,
    GraphFormatError,
    Partition,
    load_edge_list,
    load_partition,
    save_edge_list,
    save_partition,
)

from .conftest import graph_from_pairs, small_graphs


def write(tmp_path, text, name="g.txt"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_path_graph(tmp_path):
    g = load_edge_list(write(tmp_path, "0 1\n1 2"))
    assert g.num_nodes == 3
    assert g.num_edges == 2
    assert g.degrees.tolist() == [1, 2, 1]


def test_duplicate_edge_collapses(tmp_path):
    assert load_edge_list(write(tmp_path, "0 1\n1 0")).num_edges == 1


def test_self_loop_dropped(tmp_path):
    g = load_edge_list(write(tmp_path, "0 0"))
    assert g.num_edges == 0
    assert g.num_nodes == 1


def test_header_keeps_isolated_nodes(tmp_path):
    g = load_edge_list(write(tmp_path, "# N 5\n0 1\n"))
    assert g.num_nodes == 5
    assert g.degrees.tolist() == [1, 1, 0, 0, 0]


def test_malformed_line_reports_line_number(tmp_path):
    with pytest.raises(GraphFormatError, match=":2:"):
        load_edge_list(write(tmp_path, "0 1\n1 x\n"))
    with pytest.raises(GraphFormatError, match=":1:"):
        load_edge_list(write(tmp_path, "0 1 2\n"))


def test_id_beyond_declared_n(tmp_path):
    with pytest.raises(GraphFormatError, match="declared N"):
        load_edge_list(write(tmp_path, "# N 2\n0 2\n"))


def test_save_edge_list_format(tmp_path):
    g = graph_from_pairs(3, [(1, 0), (2, 1)])
    save_edge_list(g, tmp_path / "out.txt")
    assert (tmp_path / "out.txt").read_text() == "0 1\n1 2\n"


def test_partition_format_and_round_trip(tmp_path):
    p = Partition([0, 0, 1])
    save_partition(p, tmp_path / "p.txt")
    assert (tmp_path / "p.txt").read_text() == "0 0\n1 0\n2 1\n"
    assert load_partition(tmp_path / "p.txt") == p


def test_partition_rejects_gaps():
    with pytest.raises(ValueError):
        Partition([0, 2, 2])
    assert Partition.from_labels([5, 5, 9]).assignment.tolist() == [0, 0, 1]


def test_partition_file_needs_every_node_once(tmp_path):
    with pytest.raises(GraphFormatError):
        load_partition(write(tmp_path, "0 0\n0 1\n", "p.txt"))


def test_io_error_on_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_edge_list(tmp_path / "nope.txt")


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_invariants(g):
    nbrs = g.csr_neighbors
    assert np.array_equal(g.degrees, np.diff(g.csr_offsets))
    assert g.degrees.sum() == 2 * g.num_edges
    for i in range(g.num_nodes):
        row = g.neighbors(i)
        assert np.all(np.diff(row) > 0)  # sorted, no duplicates
        assert i not in row
        for j in row:
            assert i in g.neighbors(j)
    assert nbrs.size % 2 == 0


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_edge_list_round_trip(tmp_path_factory, g):
    path = tmp_path_factory.mktemp("rt") / "g.txt"
    save_edge_list(g, path)
    assert load_edge_list(path) == g


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=30))
def test_partition_round_trip(tmp_path_factory, labels):
    p = Partition.from_labels(labels)
    path = tmp_path_factory.mktemp("pt") / "p.txt"
    save_partition(p, path)
    assert load_partition(path) == p


def test_graph_is_read_only():
    g = graph_from_pairs(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.csr_neighbors[0] = 2
    assert isinstance(g, Graph)
