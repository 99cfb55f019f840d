"""
Scaled expectations on a five-node toy graph
=============================================

Node 0 has four neighbors; nodes 1 and 2 are also linked, so node 0 sits in
one triangle. Every edge is certain (p = 1) and we scale by S = 0.7.
"""

import numpy as np

from gstsparse import from_edges
from gstsparse.expectations import compute_all

g = from_edges([(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)])
ex = compute_all(g, 0.7)

# each incident edge contributes 0.7, so the expected degree is 4 * 0.7
print("expected degree of node 0:   ", ex.exp_deg[0])

# the single triangle survives with probability 0.7 ** 3
print("expected triangles at node 0:", ex.exp_tri[0])

# centered wedges: pairs of kept spokes whose rim is missing
print("expected wedges at node 0:   ", ex.exp_wedge[0])

# caps bound each count on the full graph and normalize the distance
print("caps (deg, tri, wedge):      ", ex.caps()[:, 0])

# the table for every node, as the `expect` subcommand prints it
for row in ex.rows():
    print(row)

# %% sanity check by hand for the wedge term
# E[C(X,2)] for X ~ Binomial(4, 0.7) minus the expected triangles
q = 0.7
pairs = 6 * q * q
print("hand-computed wedge:", pairs - q ** 3, np.isclose(pairs - q ** 3, ex.exp_wedge[0]))
