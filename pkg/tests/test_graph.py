import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gstsparse.graph import (
    GraphFormatError,
    common_neighbors,
    format_edgelist,
    from_edges,
    gnp_random_graph,
    load_graph,
    parse_edgelist,
    read_labels,
    write_labels,
)


def test_parse_default_confidence():
    g = parse_edgelist("0 1\n1 2")
    assert g.node_count == 3
    assert g.edge_count == 2
    assert np.all(g.p == 1.0)


def test_parse_explicit_confidence():
    g = parse_edgelist("0 1 0.99")
    assert g.node_count == 2
    assert g.p[g.edge_id(0, 1)] == 0.99


@pytest.mark.parametrize("text, msg", [
    ("0 1\n1 0", "duplicate"),
    ("0 1\n0 1 0.99", "duplicate"),
    ("2 2", "self-loop"),
    ("0 1 1.5", "outside"),
    ("0 1 0", "outside"),
    ("0 x", "line 1"),
    ("# c\n0 1\n0 1 2 3", "line 3"),
])
def test_parse_errors(text, msg):
    with pytest.raises(GraphFormatError, match=msg):
        parse_edgelist(text)


def test_comments_and_node_header():
    g = parse_edgelist("# nodes: 6\n# a comment\n0 1\n\n3 4 0.97\n")
    assert g.node_count == 6
    assert g.degree(5) == 0


def test_low_confidence_warns():
    with pytest.warns(UserWarning, match="0.95"):
        parse_edgelist("0 1 0.5")


def test_adjacency_sorted_and_symmetric():
    g = gnp_random_graph(40, 0.2, seed=3)
    assert g.degree().sum() == 2 * g.edge_count
    for u in range(g.node_count):
        nb = g.neighbors(u)
        assert np.all(np.diff(nb) > 0)
        for v, e in zip(nb, g.incident_edges(u)):
            assert set(g.edges[e]) == {u, v}
            assert g.edge_id(v, u) == e


def test_common_neighbors_examples(k3, path3):
    assert common_neighbors(k3, 0, 1) == [2]
    assert common_neighbors(path3, 0, 2) == [1]
    assert common_neighbors(path3, 0, 1) == []


def test_common_neighbors_mask(k3):
    mask = np.ones(3, dtype=bool)
    mask[k3.edge_id(0, 2)] = False
    assert common_neighbors(k3, 0, 1, mask) == []


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 25), p=st.floats(0.05, 0.9), seed=st.integers(0, 10_000))
def test_common_neighbors_match_set_intersection(n, p, seed):
    g = gnp_random_graph(n, p, seed)
    nbrs = [set(map(int, g.neighbors(u))) for u in range(n)]
    rng = np.random.default_rng(seed)
    for _ in range(10):
        u, v = rng.choice(n, 2, replace=False)
        got = common_neighbors(g, u, v)
        assert got == sorted(nbrs[u] & nbrs[v])
        assert got == common_neighbors(g, v, u)


def test_round_trip(tmp_path):
    g = gnp_random_graph(30, 0.2, seed=1, confidence=(0.96, 1.0))
    path = tmp_path / "g.txt"
    path.write_text(format_edgelist(g))
    h = load_graph(path)
    assert h.node_count == g.node_count
    assert np.array_equal(h.edges, g.edges)
    assert np.array_equal(h.p, g.p)


def test_round_trip_keeps_isolated_tail():
    g = from_edges([(0, 1)], node_count=5)
    assert parse_edgelist(format_edgelist(g)).node_count == 5


def test_subgraph_keeps_nodes(k3):
    h = k3.subgraph(np.array([True, False, False]))
    assert h.node_count == 3 and h.edge_count == 1


def test_labels_sidecar(tmp_path):
    g = from_edges([(0, 1), (1, 2)])
    write_labels(["a", "b", "c"], tmp_path / "lab.csv")
    h = load_graph(format_edgelist(g), labels=tmp_path / "lab.csv")
    assert h.labels == ("a", "b", "c")
    assert read_labels(tmp_path / "lab.csv", 4) == ["a", "b", "c", "3"]
