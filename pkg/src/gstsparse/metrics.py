"""Structural queries and similarity measures for comparing a sparse graph
with the original one, and rank aggregation across samplers."""

from __future__ import annotations

import csv
import json
import os
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy import stats
from scipy.sparse.csgraph import connected_components

from .graph import ProbGraph

DIV_EPS = 1e-12
SIGNIFICANCE = 0.01

#: Query name -> whether a larger similarity is better.
QUERIES = {
    "clustering-deviation": False,
    "lcc-deviation": False,
    "community-ari": True,
    "betweenness-spearman": True,
    "degree-spearman": True,
    "local-clustering-spearman": True,
}
MESOSCOPIC = ("community-ari", "betweenness-spearman")


def _adjacency(g: ProbGraph) -> sp.csr_matrix:
    n = g.node_count
    e = g.edges
    return sp.csr_matrix((np.ones(2 * e.shape[0], dtype=np.int64),
                          (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])), shape=(n, n))


def triangles_per_node(g: ProbGraph) -> np.ndarray:
    a = _adjacency(g)
    return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() // 2


def global_clustering(g: ProbGraph) -> float:
    """Transitivity: three times the triangles over the connected triples."""
    deg = g.degree().astype(np.int64)
    triples = int(np.sum(deg * (deg - 1) // 2))
    if triples == 0:
        return 0.0
    # each triangle is counted at its three corners
    return float(triangles_per_node(g).sum()) / triples


def largest_cc(g: ProbGraph) -> float:
    """Fraction of nodes in the largest connected component."""
    if g.node_count == 0:
        return 0.0
    _, labels = connected_components(_adjacency(g), directed=False)
    return float(np.bincount(labels).max()) / g.node_count


def deviation(value_star: float, value_orig: float) -> float:
    return abs(value_star - value_orig) / max(abs(value_orig), DIV_EPS)


def _pairs(x):
    return x * (x - 1) / 2.0


def ari(p1: Sequence[int], p2: Sequence[int]) -> float:
    """Adjusted Rand index of two partitions given as per-node labels."""
    p1 = np.asarray(p1)
    p2 = np.asarray(p2)
    if p1.shape != p2.shape:
        raise ValueError("partitions must cover the same nodes")
    n = p1.shape[0]
    _, a = np.unique(p1, return_inverse=True)
    _, b = np.unique(p2, return_inverse=True)
    table = sp.coo_matrix((np.ones(n, dtype=np.int64), (a, b))).tocsr()
    index = _pairs(table.data.astype(np.float64)).sum()
    rows = _pairs(np.asarray(table.sum(axis=1), dtype=np.float64).ravel()).sum()
    cols = _pairs(np.asarray(table.sum(axis=0), dtype=np.float64).ravel()).sum()
    total = _pairs(float(n))
    expected = rows * cols / total if total else 0.0
    max_index = 0.5 * (rows + cols)
    if max_index == expected:
        # both partitions trivial in the same way: identical up to labels
        return 1.0
    return float((index - expected) / (max_index - expected))


@dataclass(frozen=True)
class SpearmanResult:
    rho: float
    p_value: float

    @property
    def significant(self) -> bool:
        return self.p_value < SIGNIFICANCE


def spearman(x: Sequence[float], y: Sequence[float]) -> SpearmanResult:
    """Spearman's rho with average ranks for ties and a two-sided p-value from
    the t approximation ``t = rho * sqrt((n - 2) / (1 - rho^2))``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    if y.shape[0] != n or n < 3:
        raise ValueError("spearman needs two sequences of equal length >= 3")
    rx = stats.rankdata(x)
    ry = stats.rankdata(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = np.sqrt(np.sum(dx * dx) * np.sum(dy * dy))
    if denom == 0:
        return SpearmanResult(float("nan"), float("nan"))
    rho = float(np.clip(np.sum(dx * dy) / denom, -1.0, 1.0))
    if abs(rho) == 1.0:
        return SpearmanResult(rho, 0.0)
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    return SpearmanResult(rho, float(2.0 * stats.t.sf(abs(t), n - 2)))


def node_property_vector(g: ProbGraph, which: str) -> np.ndarray:
    deg = g.degree().astype(np.float64)
    if which == "degree":
        return deg
    if which == "local_clustering":
        pairs = deg * (deg - 1) / 2.0
        tri = triangles_per_node(g).astype(np.float64)
        return np.divide(tri, pairs, out=np.zeros_like(tri), where=deg >= 2)
    raise ValueError(f"unknown node property {which!r}")


def read_node_values(path: "str | os.PathLike[str]", node_count: int, cast=float) -> np.ndarray:
    """Read a ``node,value`` CSV (partition or score file)."""
    out = np.zeros(node_count, dtype=np.float64 if cast is float else np.int64)
    seen = np.zeros(node_count, dtype=bool)
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0].strip() == "node":
                continue
            u = int(row[0])
            out[u] = cast(row[1])
            seen[u] = True
    if not seen.all():
        raise ValueError(f"{path}: missing values for {int((~seen).sum())} node(s)")
    return out


def write_node_values(values: Sequence, path: "str | os.PathLike[str]", header: str = "value") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", header])
        for u, v in enumerate(values):
            w.writerow([u, v])


@dataclass
class QueryReport:
    method: str
    S: float
    similarity: dict = field(default_factory=dict)
    edge_ratio: float = 1.0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "QueryReport":
        d = json.loads(text)
        return cls(method=d["method"], S=float(d["S"]), similarity=dict(d["similarity"]),
                   edge_ratio=float(d.get("edge_ratio", 1.0)), extra=dict(d.get("extra", {})))


def evaluate(original: ProbGraph, sparse: ProbGraph, method: str, S: float,
             partitions: Optional[tuple] = None, scores: Optional[tuple] = None,
             queries: Optional[Sequence[str]] = None) -> QueryReport:
    """Similarity of ``sparse`` to ``original`` for each structural query.

    ``partitions`` and ``scores`` are ``(original, sparse)`` pairs of per-node
    arrays produced externally (community labels, betweenness scores); the
    mesoscopic queries are skipped when they are missing.
    """
    wanted = list(QUERIES) if queries is None else list(queries)
    sim: dict[str, float] = {}
    extra: dict[str, object] = {}
    if "clustering-deviation" in wanted:
        sim["clustering-deviation"] = deviation(global_clustering(sparse), global_clustering(original))
    if "lcc-deviation" in wanted:
        sim["lcc-deviation"] = deviation(largest_cc(sparse), largest_cc(original))
    if "community-ari" in wanted and partitions is not None:
        sim["community-ari"] = ari(partitions[0], partitions[1])
    if "betweenness-spearman" in wanted and scores is not None:
        r = spearman(scores[0], scores[1])
        sim["betweenness-spearman"] = r.rho
        extra["betweenness-significant"] = r.significant
    for name, which in (("degree-spearman", "degree"),
                        ("local-clustering-spearman", "local_clustering")):
        if name in wanted:
            r = spearman(node_property_vector(sparse, which), node_property_vector(original, which))
            sim[name] = r.rho
            extra[f"{name.rsplit('-', 1)[0]}-significant"] = r.significant
    ratio = sparse.edge_count / original.edge_count if original.edge_count else 0.0
    return QueryReport(method=method, S=float(S), similarity=sim, edge_ratio=ratio, extra=extra)


def average_reports(reports: Sequence[QueryReport]) -> dict:
    """Mean similarity per ``(method, S, query)``, NaN entries ignored."""
    acc: dict = defaultdict(list)
    for rep in reports:
        for q, v in rep.similarity.items():
            if v is not None and not np.isnan(v):
                acc[(rep.method, rep.S, q)].append(v)
    table: dict = defaultdict(dict)
    for (method, S, q), vals in acc.items():
        table[method][(S, q)] = float(np.mean(vals))
    return dict(table)


@dataclass
class Rankings:
    cells: list
    distribution: dict
    mean: dict

    def rows(self):
        """``(method, S, query, rank)`` rows in cell order."""
        for method, ranks in self.distribution.items():
            for (S, q), rank in zip(self.cells, ranks):
                yield method, S, q, rank


def rankings(scores: Mapping[str, Mapping], higher_is_better: Mapping[str, bool]) -> Rankings:
    """Rank methods 1..k within every ``(S, query)`` cell (1 = best, ties share
    the average rank) and aggregate per method.

    ``scores[method][cell]`` holds a similarity; a cell is a ``(S, query)``
    tuple or a bare query name. Only cells present for every method count.
    """
    methods = list(scores)
    if not methods:
        return Rankings([], {}, {})
    common = set(scores[methods[0]])
    for m in methods[1:]:
        common &= set(scores[m])

    def query_of(cell):
        return cell[1] if isinstance(cell, tuple) else cell

    cells = sorted(common, key=lambda c: c if isinstance(c, tuple) else (0.0, c))
    dist: dict[str, list] = {m: [] for m in methods}
    for cell in cells:
        vals = np.array([scores[m][cell] for m in methods], dtype=np.float64)
        key = -vals if higher_is_better[query_of(cell)] else vals
        ranks = stats.rankdata(key, method="average")
        for m, r in zip(methods, ranks):
            dist[m].append(float(r))
    mean = {m: float(np.mean(r)) if r else float("nan") for m, r in dist.items()}
    return Rankings(cells, dist, mean)
