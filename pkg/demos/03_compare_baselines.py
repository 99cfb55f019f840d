"""
GST against score-based filters
================================

LD, LJS and RE are told to keep exactly as many edges as GST did, and each
sparse graph is scored on degree and clustering queries.
"""

import numpy as np

from gstsparse import GstConfig, run
from gstsparse.baselines import sample
from gstsparse.graph import gnp_random_graph
from gstsparse.metrics import QUERIES, average_reports, evaluate, rankings

g = gnp_random_graph(300, 0.06, seed=3, confidence=(0.8, 1.0))
queries = ["clustering-deviation", "lcc-deviation", "degree-spearman", "local-clustering-spearman"]

reports = []
for S in (0.3, 0.6):
    for rep in range(5):
        res = run(g, GstConfig(S=S, seed=rep, edge_order="shuffle"))
        k = int(res.included.sum())
        masks = {"gst": res.included}
        masks.update({m: sample(m, g, k, seed=rep) for m in ("ld", "ljs", "re")})
        for name, mask in masks.items():
            reports.append(evaluate(g, g.subgraph(mask), name, S, queries=queries))

table = average_reports(reports)
for method, cells in table.items():
    print(method, {f"{S}/{q}": round(v, 3) for (S, q), v in sorted(cells.items())})

# %% rank the methods inside every (S, query) cell and average
ranks = rankings(table, QUERIES)
for method, mean in sorted(ranks.mean.items(), key=lambda kv: kv[1]):
    print(f"{method:4s} mean rank {mean:.2f}  spread {np.ptp(ranks.distribution[method]):.1f}")
