import numpy as np
import pytest

from gstsparse.expectations import compute_all, scaled_contributions
from gstsparse.graph import from_edges, gnp_random_graph
from gstsparse.oracle import (
    BudgetExceeded,
    OracleBudget,
    enumerate_worlds_expectation,
    exhaustive_optimum,
    nash_check,
)
from gstsparse.solver import GstConfig, SubgraphState, run


def test_worlds_examples(k3, hub5):
    assert enumerate_worlds_expectation(k3, scaled_contributions(k3, 0.5), 0, "triangle") == \
        pytest.approx(0.125)
    single = from_edges([(0, 1)])
    assert enumerate_worlds_expectation(single, np.array([0.7]), 0, "degree") == pytest.approx(0.7)
    ps = scaled_contributions(hub5, 0.7)
    assert enumerate_worlds_expectation(hub5, ps, 0, "degree") == pytest.approx(2.8)
    assert enumerate_worlds_expectation(hub5, ps, 0, "wedge") == pytest.approx(2.597)


def test_worlds_budget():
    g = from_edges([(0, i) for i in range(1, 15)])
    with pytest.raises(BudgetExceeded):
        enumerate_worlds_expectation(g, g.p, 0, "degree")
    assert enumerate_worlds_expectation(g, g.p * 0.5, 0, "degree", OracleBudget(max_world_edges=14)) == \
        pytest.approx(7.0)


def test_exhaustive_degenerate():
    g = gnp_random_graph(6, 0.5, seed=1)
    d, mask = exhaustive_optimum(g, GstConfig(S=1.0))
    assert d == pytest.approx(0.0) and mask.all()
    d, mask = exhaustive_optimum(g, GstConfig(S=0.0))
    assert d == pytest.approx(0.0) and not mask.any()


def test_exhaustive_k3_golden(k3):
    # empty: 1.875; one edge or a 2-path: 0.875; full: 4.125
    d, mask = exhaustive_optimum(k3, GstConfig(S=0.5, properties="23"))
    assert d == pytest.approx(0.875, abs=1e-12)
    assert list(mask) == [False, False, True]


def test_exhaustive_budget():
    g = gnp_random_graph(10, 0.9, seed=0)
    with pytest.raises(BudgetExceeded):
        exhaustive_optimum(g, GstConfig(S=0.5))


def test_nash_examples():
    g = gnp_random_graph(7, 0.5, seed=2)
    cfg = GstConfig(S=0.0)
    assert not nash_check(g, SubgraphState(g), cfg)
    assert nash_check(g, np.zeros(g.edge_count, dtype=bool), cfg)
    cfg = GstConfig(S=0.6, T=0.0, properties="23")
    res = run(g, cfg)
    assert nash_check(g, res.state, cfg, res.expectations)


def test_gst_never_beats_optimum():
    rng = np.random.default_rng(3)
    for i in range(30):
        g = gnp_random_graph(int(rng.integers(4, 8)), 0.5, seed=int(rng.integers(1 << 30)))
        if g.edge_count > 12:
            continue
        cfg = GstConfig(S=float(rng.uniform(0.1, 0.9)), T=0.0, properties=["2", "23", "23w"][i % 3])
        res = run(g, cfg)
        opt, mask = exhaustive_optimum(g, cfg, compute_all(g, cfg.S))
        assert res.final_distance >= opt - 1e-9
        assert nash_check(g, mask, cfg)
