import numpy as np
import pytest

from gstsparse.expectations import compute_all
from gstsparse.graph import from_edges, gnp_random_graph, random_graph_mean_degree
from gstsparse.oracle import brute_counts, nash_check
from gstsparse.solver import (
    GstConfig,
    SubgraphState,
    affected_set,
    flip,
    gain,
    node_distance,
    parse_properties,
    recount,
    run,
    total_distance,
)

from .conftest import random_graphs


def test_parse_properties():
    assert parse_properties("23") == {"degree", "triangle"}
    assert parse_properties(["degree", "triangle", "wedge"]) == parse_properties("23w")
    with pytest.raises(ValueError):
        parse_properties(["triangle"])


def test_config_validation():
    with pytest.raises(ValueError):
        GstConfig(S=1.2)
    with pytest.raises(ValueError):
        GstConfig(S=0.5, T=-1)
    with pytest.raises(ValueError):
        GstConfig(S=0.5, edge_order="random")
    assert GstConfig(S=0.5, properties="23").label == "GST_2,3"
    assert GstConfig(S=0.5, normalized=False).label == "UNGST_2,3,w"


def test_node_distance_examples(star4):
    ex = compute_all(star4, 0.7)  # center expects 2.8 of cap 4
    state = SubgraphState(star4)
    flip(0, state)
    assert state.cur_deg[0] == 3
    assert node_distance(0, state, ex, "degree") == pytest.approx(0.05)
    assert node_distance(0, state, ex, "degree", normalized=False) == pytest.approx(0.2)
    iso = from_edges([(0, 1)], node_count=3)
    s2 = SubgraphState(iso)
    ex2 = compute_all(iso, 0.5)
    for l in ("degree", "triangle", "wedge"):
        assert node_distance(2, s2, ex2, l) == 0.0


def test_total_distance_examples(k3):
    g = gnp_random_graph(20, 0.3, seed=1)
    assert total_distance(SubgraphState(g), compute_all(g, 1.0), GstConfig(S=1.0)) == pytest.approx(0.0)
    single = from_edges([(0, 1)])
    cfg = GstConfig(S=0.0, properties="2")
    assert total_distance(SubgraphState(single), compute_all(single, 0.0), cfg) == pytest.approx(2.0)
    cfg = GstConfig(S=0.5, properties="23")
    assert total_distance(SubgraphState(k3), compute_all(k3, 0.5), cfg) == pytest.approx(4.125)


def test_affected_set_examples(k3, path3):
    state = SubgraphState(k3)
    assert affected_set(k3.edge_id(0, 1), state) == {0, 1, 2}
    flip(k3.edge_id(0, 2), state)
    assert affected_set(k3.edge_id(0, 1), state) == {0, 1}
    assert affected_set(path3.edge_id(0, 1), SubgraphState(path3)) == {0, 1}


def test_gain_examples():
    single = from_edges([(0, 1)])
    cfg0 = GstConfig(S=0.0, properties="2")
    assert gain(0, SubgraphState(single), compute_all(single, 0.0), cfg0) == pytest.approx(2.0)
    cfg1 = GstConfig(S=1.0)
    assert gain(0, SubgraphState(single), compute_all(single, 1.0), cfg1) == pytest.approx(-2.0)


def test_gain_does_not_mutate(k3):
    state = SubgraphState(k3)
    before = state.counts().copy(), state.included.copy()
    gain(0, state, compute_all(k3, 0.5), GstConfig(S=0.5))
    assert np.array_equal(state.counts(), before[0])
    assert np.array_equal(state.included, before[1])


def test_flip_examples(k3):
    state = SubgraphState(k3)
    e = k3.edge_id(0, 1)
    flip(e, state)
    assert list(state.cur_tri) == [0, 0, 0]
    assert list(state.cur_wedge) == [0, 0, 1]
    flip(e, state)
    assert list(state.cur_deg) == [2, 2, 2]
    assert list(state.cur_tri) == [1, 1, 1]
    assert list(state.cur_wedge) == [0, 0, 0]


def test_recount_matches_brute_force():
    for g in random_graphs(20, seed=11, n_range=(3, 20)):
        mask = np.random.default_rng(g.edge_count).random(g.edge_count) < 0.6
        counts = np.vstack(recount(g, mask))
        assert np.array_equal(counts, brute_counts(g, mask[None, :])[0])


def test_incremental_counts_after_random_flips():
    rng = np.random.default_rng(0)
    for g in random_graphs(10, seed=12, n_range=(5, 25)):
        if g.edge_count == 0:
            continue
        state = SubgraphState(g)
        for e in rng.integers(0, g.edge_count, size=200):
            flip(e, state)
            assert state.is_consistent()


def test_gain_is_global_distance_change():
    rng = np.random.default_rng(1)
    for i, g in enumerate(random_graphs(40, seed=13, n_range=(3, 15))):
        if g.edge_count == 0:
            continue
        cfg = GstConfig(S=float(rng.uniform(0, 1)), properties=["2", "23", "23w"][i % 3],
                        normalized=bool(i % 4))
        ex = compute_all(g, cfg.S)
        state = SubgraphState(g, rng.random(g.edge_count) < 0.5)
        for e in range(g.edge_count):
            before = total_distance(state, ex, cfg)
            other = state.copy()
            flip(e, other)
            after = total_distance(SubgraphState(g, other.included), ex, cfg)
            assert gain(e, state, ex, cfg) == pytest.approx(before - after, abs=1e-9)


def test_run_full_certainty_keeps_everything():
    g = gnp_random_graph(30, 0.3, seed=4)
    res = run(g, GstConfig(S=1.0, T=0.0))
    assert res.included.all()
    assert res.rounds == 1 and res.flips == 0
    assert res.status == "equilibrium"


def test_run_zero_scaling_removes_everything():
    g = gnp_random_graph(30, 0.3, seed=4, confidence=(0.96, 1.0))
    for props in ("2", "23", "23w"):
        res = run(g, GstConfig(S=0.0, T=0.0, properties=props))
        assert not res.included.any()
        assert res.final_distance == pytest.approx(0.0)


def test_trace_descends_and_ends_at_nash():
    rng = np.random.default_rng(5)
    for i, g in enumerate(random_graphs(25, seed=14, n_range=(4, 20))):
        cfg = GstConfig(S=float(rng.uniform(0.1, 0.9)), T=0.0, properties=["2", "23", "23w"][i % 3])
        res = run(g, cfg)
        d = np.array(res.trace.total_distance)
        flips = np.array(res.trace.flips)
        assert np.all(np.diff(d) <= 1e-12)
        assert np.all(np.diff(d)[flips[1:] > 0] < 0)
        assert nash_check(g, res.state, cfg, res.expectations)
        assert res.state.is_consistent()
        assert d[-1] == pytest.approx(total_distance(res.state, res.expectations, cfg))


def test_tolerance_never_adds_rounds():
    for i, g in enumerate(random_graphs(20, seed=15, n_range=(10, 30))):
        a = run(g, GstConfig(S=0.4, T=0.0))
        b = run(g, GstConfig(S=0.4, T=0.01))
        assert b.rounds <= a.rounds
        # identical trajectory up to the early stop
        assert b.trace.total_distance == a.trace.total_distance[:b.rounds + 1]


def test_deterministic():
    g = random_graph_mean_degree(200, 8, seed=2)
    for order in ("by-id", "shuffle"):
        cfg = GstConfig(S=0.5, T=0.0, seed=7, edge_order=order)
        a, b = run(g, cfg), run(g, cfg)
        assert np.array_equal(a.included, b.included)
        assert a.trace.total_distance == b.trace.total_distance
        assert a.trace.flips == b.trace.flips


def test_shuffle_order_reaches_equilibrium():
    g = random_graph_mean_degree(60, 6, seed=3)
    cfg = GstConfig(S=0.5, T=0.0, seed=1, edge_order="shuffle")
    res = run(g, cfg)
    assert res.status == "equilibrium"
    assert nash_check(g, res.state, cfg, res.expectations)


def test_max_rounds_is_reported():
    g = random_graph_mean_degree(200, 10, seed=1)
    res = run(g, GstConfig(S=0.5, T=0.0, max_rounds=1))
    assert res.status == "max_rounds" and res.rounds == 1


def test_unnormalized_objective_differs():
    g = random_graph_mean_degree(150, 10, seed=5)
    a = run(g, GstConfig(S=0.5, T=0.0, properties="23"))
    b = run(g, GstConfig(S=0.5, T=0.0, properties="23", normalized=False))
    assert not np.array_equal(a.included, b.included)
    assert b.trace.total_distance[0] > a.trace.total_distance[0]


def test_wedges_maintained_without_wedge_objective():
    g = random_graph_mean_degree(80, 8, seed=6)
    res = run(g, GstConfig(S=0.5, T=0.0, properties="2"))
    assert res.state.is_consistent()


def test_edge_ratio_grows_with_scaling():
    medians = []
    for S in (0.2, 0.5, 0.9):
        ratios = [run(random_graph_mean_degree(200, 10, seed=s), GstConfig(S=S, T=0.01)).edge_ratio
                  for s in range(10)]
        medians.append(np.median(ratios))
    assert medians[0] < medians[1] < medians[2]
