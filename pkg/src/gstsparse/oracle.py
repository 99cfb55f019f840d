"""Brute-force references for tiny instances.

Counts here come from dense adjacency-matrix products and explicit world
enumeration, never from the merge-based routines they are meant to check.
Only the distance formula itself is shared with the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .expectations import ScaledExpectations, compute_all
from .graph import ProbGraph
from .solver import GAIN_EPS, GstConfig, SubgraphState, distance_weights, node_distance_terms


#: Distances closer than this are treated as equal (rounding of the sums).
TIE_TOL = 1e-10


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_edges_exhaustive: int = 16
    max_world_edges: int = 12


DEFAULT_BUDGET = OracleBudget()


def _edge_lookup(g: ProbGraph) -> dict:
    return {(int(u), int(v)): i for i, (u, v) in enumerate(g.edges)} | \
        {(int(v), int(u)): i for i, (u, v) in enumerate(g.edges)}


def _bits(k: int) -> np.ndarray:
    """All ``2**k`` inclusion patterns; row ``s`` has bit ``i`` at column ``i``."""
    s = np.arange(2 ** k, dtype=np.int64)
    return ((s[:, None] >> np.arange(k)) & 1).astype(bool)


def enumerate_worlds_expectation(g: ProbGraph, ps: np.ndarray, u: int, l: str,
                                 budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """``E[m_l(u)]`` by summing over every inclusion pattern of the edges that
    can influence ``m_l(u)``."""
    lookup = _edge_lookup(g)
    nbrs = sorted(v for (a, v) in lookup if a == u)
    spokes = [lookup[(u, v)] for v in nbrs]
    rims = {}
    if l in ("triangle", "wedge", "3", "w"):
        for v, x in combinations(nbrs, 2):
            if (v, x) in lookup:
                rims[(v, x)] = lookup[(v, x)]
    relevant = spokes + sorted(set(rims.values()))
    if len(relevant) > budget.max_world_edges:
        raise BudgetExceeded(f"{len(relevant)} relevant edges > {budget.max_world_edges}")
    col = {e: i for i, e in enumerate(relevant)}
    worlds = _bits(len(relevant))
    q = ps[relevant] if relevant else np.zeros(0)
    weight = np.prod(np.where(worlds, q, 1.0 - q), axis=1)

    if l in ("degree", "2"):
        m = worlds[:, [col[e] for e in spokes]].sum(axis=1)
    else:
        m = np.zeros(worlds.shape[0])
        for v, x in combinations(nbrs, 2):
            both = worlds[:, col[lookup[(u, v)]]] & worlds[:, col[lookup[(u, x)]]]
            closed = worlds[:, col[rims[(v, x)]]] if (v, x) in rims else np.zeros_like(both)
            m += both & (closed if l in ("triangle", "3") else ~closed)
    return float(np.sum(weight * m))


def brute_counts(g: ProbGraph, inclusion: np.ndarray) -> np.ndarray:
    """Degree, triangle and centered-wedge counts for a batch of subgraphs.

    ``inclusion`` is ``(batch, |E|)`` boolean; returns ``(batch, 3, n)``.
    """
    inclusion = np.atleast_2d(np.asarray(inclusion, dtype=bool))
    b, n = inclusion.shape[0], g.node_count
    a = np.zeros((b, n, n))
    u, v = g.edges[:, 0], g.edges[:, 1]
    a[:, u, v] = inclusion
    a[:, v, u] = inclusion
    open_pair = 1.0 - np.eye(n) - a
    a2 = a @ a
    deg = a.sum(axis=2)
    tri = np.einsum("bij,bji->bi", a2, a) / 2.0
    wedge = np.einsum("bij,bjk,bki->bi", a, open_pair, a) / 2.0
    return np.rint(np.stack([deg, tri, wedge], axis=1)).astype(np.int64)


def brute_total_distance(g: ProbGraph, inclusion: np.ndarray, expectations: ScaledExpectations,
                         config: GstConfig) -> np.ndarray:
    w = distance_weights(expectations, config.properties, config.normalized)
    counts = brute_counts(g, inclusion)
    return node_distance_terms(counts, expectations.expected(), w).sum(axis=(1, 2))


def exhaustive_optimum(g: ProbGraph, config: GstConfig,
                       expectations: Optional[ScaledExpectations] = None,
                       budget: OracleBudget = DEFAULT_BUDGET, chunk: int = 4096):
    """Minimum total distance over all ``2**|E|`` subgraphs.

    Returns ``(distance, inclusion mask)``; among ties the lexicographically
    smallest inclusion vector (edge 0 first, excluded before included) wins.
    """
    m = g.edge_count
    if m > budget.max_edges_exhaustive:
        raise BudgetExceeded(f"{m} edges > {budget.max_edges_exhaustive}")
    if expectations is None:
        expectations = compute_all(g, config.S)
    best_d, best_s = np.inf, 0
    shifts = np.arange(m - 1, -1, -1)
    for start in range(0, 2 ** m, chunk):
        s = np.arange(start, min(start + chunk, 2 ** m), dtype=np.int64)
        # edge 0 is the most significant bit, so numeric order is lexicographic
        inc = ((s[:, None] >> shifts) & 1).astype(bool)
        d = brute_total_distance(g, inc, expectations, config)
        i = int(np.flatnonzero(d <= d.min() + TIE_TOL)[0])
        if d[i] < best_d - TIE_TOL:
            best_d, best_s = float(d[i]), int(s[i])
    mask = ((best_s >> shifts) & 1).astype(bool) if m else np.zeros(0, dtype=bool)
    return best_d, mask


def flip_deltas(g: ProbGraph, included: np.ndarray, expectations: ScaledExpectations,
                config: GstConfig) -> np.ndarray:
    """For every edge, total distance now minus total distance after toggling it."""
    included = np.asarray(included, dtype=bool)
    m = g.edge_count
    batch = np.repeat(included[None, :], m + 1, axis=0)
    idx = np.arange(m)
    batch[idx + 1, idx] = ~batch[idx + 1, idx]
    d = brute_total_distance(g, batch, expectations, config)
    return d[0] - d[1:]


def nash_check(g: ProbGraph, state, config: GstConfig,
               expectations: Optional[ScaledExpectations] = None) -> bool:
    """True iff no single edge toggle lowers the total distance by more than
    the acceptance threshold. ``state`` is a SubgraphState or inclusion mask."""
    included = state.included if isinstance(state, SubgraphState) else state
    if expectations is None:
        expectations = compute_all(g, config.S)
    if g.edge_count == 0:
        return True
    return bool(np.all(flip_deltas(g, included, expectations, config) <= GAIN_EPS + TIE_TOL))
