"""
Checking the sampler against brute force
=========================================

On graphs with a dozen edges every subgraph can be scored, so we can see how
far a best-response equilibrium lands from the true optimum.
"""

import numpy as np

from gstsparse import GstConfig, run
from gstsparse.graph import gnp_random_graph
from gstsparse.oracle import enumerate_worlds_expectation, exhaustive_optimum, nash_check

rng = np.random.default_rng(0)
gaps = []
for i in range(30):
    g = gnp_random_graph(7, 0.45, seed=int(rng.integers(1 << 30)), confidence=(0.7, 1.0))
    if not 1 <= g.edge_count <= 14:
        continue
    cfg = GstConfig(S=0.5, T=0.0, properties="23")
    res = run(g, cfg)
    best, mask = exhaustive_optimum(g, cfg, res.expectations)
    assert nash_check(g, res.state, cfg, res.expectations)
    gaps.append(res.final_distance - best)

gaps = np.array(gaps)
print(f"{len(gaps)} graphs, optimum reached on {np.mean(gaps < 1e-9):.0%}")
print("worst gap:", gaps.max().round(4))

# %% the closed-form expectations agree with summing over possible worlds
ex = res.expectations
for u in range(g.node_count):
    brute = [enumerate_worlds_expectation(g, ex.ps, u, l) for l in ("degree", "triangle", "wedge")]
    print(u, np.round(ex.expected()[:, u], 6), np.round(brute, 6))
