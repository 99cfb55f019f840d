"""Filtering baselines: local degree (LD), local Jaccard (LJS), random edge (RE).

LD and LJS score every edge from each endpoint's point of view, keep the
better of the two, and retain the ``keep_count`` highest-scoring edges (ties
broken by ascending edge id) so the output size can match another sampler
exactly.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from .graph import ProbGraph


def keep_count_from_ratio(g: ProbGraph, ratio: float) -> int:
    """``ratio * |E|`` rounded half-up and clamped to ``[0, |E|]``."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"ratio must lie in [0, 1], got {ratio}")
    k = int(math.floor(ratio * g.edge_count + 0.5))
    return min(max(k, 0), g.edge_count)


def _check_keep(g: ProbGraph, keep_count: int) -> None:
    if not 0 <= keep_count <= g.edge_count:
        raise ValueError(f"keep_count must lie in [0, {g.edge_count}], got {keep_count}")


def select_top(scores: np.ndarray, keep_count: int) -> np.ndarray:
    """Boolean mask of the ``keep_count`` best scores, ties to lower edge id."""
    if not np.all(np.isfinite(scores)):
        raise ValueError("edge scores must be finite")
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    mask = np.zeros(scores.shape[0], dtype=bool)
    mask[order[:keep_count]] = True
    return mask


def _node_rank_scores(g: ProbGraph, key: np.ndarray, transform) -> np.ndarray:
    """Rank each node's incident edges by ``key`` (per directed adjacency slot,
    descending, ties by ascending neighbor) and return the per-edge max over
    both endpoints of ``transform(rank, deg)``."""
    n = g.node_count
    deg = g.degree()
    owner = np.repeat(np.arange(n), deg)
    order = np.lexsort((g.nbr, -key, owner))
    rank = np.empty_like(order)
    rank[order] = np.arange(order.shape[0]) - g.indptr[owner[order]] + 1
    slot_score = transform(rank.astype(np.float64), deg[owner].astype(np.float64))
    scores = np.full(g.edge_count, -np.inf)
    np.maximum.at(scores, g.adj_eid, slot_score)
    return scores


def local_degree_scores(g: ProbGraph) -> np.ndarray:
    deg = g.degree()

    def transform(rank, d):
        out = np.ones_like(rank)
        big = d > 1
        out[big] = 1.0 - np.log(rank[big]) / np.log(d[big])
        return out

    return _node_rank_scores(g, deg[g.nbr].astype(np.float64), transform)


def jaccard_similarity(g: ProbGraph) -> np.ndarray:
    """Per-edge Jaccard similarity of the endpoints' neighborhoods, each
    excluding the other endpoint; 0 when both are otherwise empty."""
    n = g.node_count
    e = g.edges
    if g.edge_count == 0:
        return np.zeros(0)
    a = sp.csr_matrix((np.ones(2 * e.shape[0]), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
                      shape=(n, n))
    common = np.asarray((a @ a)[e[:, 0], e[:, 1]]).ravel()
    deg = g.degree()
    union = (deg[e[:, 0]] - 1) + (deg[e[:, 1]] - 1) - common
    return np.divide(common, union, out=np.zeros_like(common), where=union > 0)


def local_jaccard_scores(g: ProbGraph) -> np.ndarray:
    sim = jaccard_similarity(g)
    return _node_rank_scores(g, sim[g.adj_eid], lambda rank, d: 1.0 - (rank - 1.0) / d)


def local_degree(g: ProbGraph, keep_count: int) -> np.ndarray:
    _check_keep(g, keep_count)
    return select_top(local_degree_scores(g), keep_count)


def local_jaccard(g: ProbGraph, keep_count: int) -> np.ndarray:
    _check_keep(g, keep_count)
    return select_top(local_jaccard_scores(g), keep_count)


def random_edge(g: ProbGraph, keep_count: int, seed: int) -> np.ndarray:
    """Uniformly random ``keep_count``-subset of the edges as a boolean mask."""
    _check_keep(g, keep_count)
    rng = np.random.default_rng(seed)
    mask = np.zeros(g.edge_count, dtype=bool)
    mask[rng.permutation(g.edge_count)[:keep_count]] = True
    return mask


def sample(method: str, g: ProbGraph, keep_count: int, seed: int = 0) -> np.ndarray:
    """Dispatch by name: ``"ld"``, ``"ljs"`` or ``"re"``."""
    if method == "ld":
        return local_degree(g, keep_count)
    if method == "ljs":
        return local_jaccard(g, keep_count)
    if method == "re":
        return random_edge(g, keep_count, seed)
    raise ValueError(f"unknown baseline {method!r}")
