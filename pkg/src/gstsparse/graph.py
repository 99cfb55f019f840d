"""Undirected graphs with per-edge confidences and sorted CSR adjacency."""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

#: Confidences at or below this value trigger a warning (functional networks
#: are normally built with very high confidence).
LOW_CONFIDENCE = 0.95


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input."""


@dataclass(frozen=True, eq=False)
class ProbGraph:
    """Immutable undirected graph ``(V, E, p)``.

    Edges are stored with ``edges[e] = (u, v)``, ``u < v``. The adjacency is in
    CSR form: the neighbors of ``u`` are ``nbr[indptr[u]:indptr[u + 1]]`` in
    strictly ascending order, and ``adj_eid`` holds the matching edge ids.
    """

    node_count: int
    edges: np.ndarray
    p: np.ndarray
    indptr: np.ndarray
    nbr: np.ndarray
    adj_eid: np.ndarray
    labels: Optional[Sequence[str]] = field(default=None)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def degree(self, u: Optional[int] = None):
        deg = np.diff(self.indptr)
        return deg if u is None else int(deg[u])

    def neighbors(self, u: int) -> np.ndarray:
        return self.nbr[self.indptr[u]:self.indptr[u + 1]]

    def incident_edges(self, u: int) -> np.ndarray:
        return self.adj_eid[self.indptr[u]:self.indptr[u + 1]]

    def edge_id(self, u: int, v: int) -> int:
        """Return the id of edge ``{u, v}``, or -1 if absent."""
        nb = self.neighbors(u)
        i = int(np.searchsorted(nb, v))
        if i < nb.shape[0] and nb[i] == v:
            return int(self.adj_eid[self.indptr[u] + i])
        return -1

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_id(u, v) >= 0

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def subgraph(self, mask: np.ndarray) -> "ProbGraph":
        """Edge-induced subgraph on the same node set, keeping ``mask``-ed edges."""
        mask = np.asarray(mask, dtype=bool)
        return from_edges(self.edges[mask], self.p[mask], node_count=self.node_count,
                          labels=self.labels)

    def __repr__(self) -> str:
        return f"ProbGraph(node_count={self.node_count}, edge_count={self.edge_count})"


def from_edges(
    edges: Iterable[Sequence[int]],
    p: Optional[Iterable[float]] = None,
    node_count: Optional[int] = None,
    labels: Optional[Sequence[str]] = None,
) -> ProbGraph:
    """Build a :class:`ProbGraph` from an edge list.

    Endpoints are canonicalized to ``u < v``; edge ids follow input order.

    Raises:
        ValueError: on self-loops, duplicate pairs (either orientation),
            negative ids, confidences outside ``(0, 1]`` or a ``node_count``
            too small for the given edges.
    """
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    e = e.reshape(-1, 2)
    m = e.shape[0]
    if p is None:
        probs = np.ones(m, dtype=np.float64)
    else:
        probs = np.asarray(list(p) if not isinstance(p, np.ndarray) else p, dtype=np.float64).copy()
        if probs.shape != (m,):
            raise ValueError(f"expected {m} confidences, got {probs.shape[0]}")
    if m and e.min() < 0:
        raise ValueError("node ids must be non-negative")
    if np.any(e[:, 0] == e[:, 1]):
        bad = e[e[:, 0] == e[:, 1]][0]
        raise ValueError(f"self-loop at node {bad[0]}")
    if np.any(~((probs > 0) & (probs <= 1))):
        raise ValueError("edge confidence must lie in (0, 1]")
    e = np.sort(e, axis=1)

    inferred = int(e.max()) + 1 if m else 0
    n = inferred if node_count is None else int(node_count)
    if n < inferred:
        raise ValueError(f"node_count {n} too small for node id {inferred - 1}")

    key = e[:, 0] * max(n, 1) + e[:, 1]
    uniq, counts = np.unique(key, return_counts=True)
    if np.any(counts > 1):
        k = uniq[counts > 1][0]
        raise ValueError(f"duplicate edge {{{k // n}, {k % n}}}")

    # both orientations, sorted by (source, neighbor)
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    eid = np.concatenate([np.arange(m), np.arange(m)])
    order = np.lexsort((dst, src))
    src, dst, eid = src[order], dst[order], eid[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])

    for arr in (e, probs, indptr, dst, eid):
        arr.setflags(write=False)
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != n:
            raise ValueError(f"expected {n} labels, got {len(labels)}")
    return ProbGraph(n, e, probs, indptr, dst.astype(np.int64), eid.astype(np.int64), labels)


def parse_edgelist(text: str) -> ProbGraph:
    """Parse edge-list text: ``u v`` or ``u v p`` per line, ``#`` comments.

    A comment of the form ``# nodes: N`` sets the node count (to keep trailing
    isolated nodes).
    """
    edges, probs, linenos = [], [], []
    node_count = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("nodes:"):
                try:
                    node_count = int(body.split(":", 1)[1])
                except ValueError:
                    raise GraphFormatError(f"line {lineno}: bad node-count header {raw!r}") from None
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"line {lineno}: expected 'u v [p]', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            prob = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GraphFormatError(f"line {lineno}: cannot parse {raw!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative node id")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at node {u}")
        if not 0.0 < prob <= 1.0:
            raise GraphFormatError(f"line {lineno}: confidence {prob} outside (0, 1]")
        edges.append((u, v))
        probs.append(prob)
        linenos.append(lineno)

    seen: dict[tuple[int, int], int] = {}
    for (u, v), lineno in zip(edges, linenos):
        k = (min(u, v), max(u, v))
        if k in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {{{k[0]}, {k[1]}}} "
                                   f"(first seen on line {seen[k]})")
        seen[k] = lineno
    low = sum(1 for q in probs if q <= LOW_CONFIDENCE)
    if low:
        warnings.warn(f"{low} edge confidence(s) <= {LOW_CONFIDENCE}", stacklevel=2)
    try:
        return from_edges(edges, probs, node_count=node_count)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def load_graph(source: "str | os.PathLike[str]", labels: "str | os.PathLike[str] | None" = None) -> ProbGraph:
    """Load an edge list from a file path, or parse it directly if ``source``
    contains a newline or is not an existing path."""
    text = None
    if isinstance(source, os.PathLike) or ("\n" not in source and os.path.exists(source)):
        with open(source) as fh:
            text = fh.read()
    else:
        text = source
    g = parse_edgelist(text)
    if labels is not None:
        g = with_labels(g, read_labels(labels, g.node_count))
    return g


def format_edgelist(g: ProbGraph, mask: Optional[np.ndarray] = None, with_p: Optional[bool] = None) -> str:
    """Serialize ``g`` (or the masked edges of ``g``) as edge-list text.

    Confidences use ``repr`` so they round-trip exactly; the column is omitted
    when all confidences are 1 unless ``with_p`` forces it.
    """
    idx = np.arange(g.edge_count) if mask is None else np.flatnonzero(mask)
    if with_p is None:
        with_p = bool(np.any(g.p != 1.0))
    lines = [f"# nodes: {g.node_count}"]
    for e in idx:
        u, v = g.edges[e]
        lines.append(f"{u} {v} {float(g.p[e])!r}" if with_p else f"{u} {v}")
    return "\n".join(lines) + "\n"


def write_graph(g: ProbGraph, path: "str | os.PathLike[str]", mask: Optional[np.ndarray] = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_edgelist(g, mask))


def read_labels(path: "str | os.PathLike[str]", node_count: int) -> list[str]:
    """Read a ``node,label`` CSV sidecar; unlisted nodes get their id as label."""
    import csv

    out = [str(i) for i in range(node_count)]
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0] == "node":
                continue
            out[int(row[0])] = row[1]
    return out


def write_labels(labels: Sequence[str], path: "str | os.PathLike[str]") -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "label"])
        for i, lab in enumerate(labels):
            w.writerow([i, lab])


def with_labels(g: ProbGraph, labels: Sequence[str]) -> ProbGraph:
    return from_edges(g.edges, g.p, node_count=g.node_count, labels=labels)


def common_neighbors(g: ProbGraph, u: int, v: int, mask: Optional[np.ndarray] = None) -> list[int]:
    """Common neighbors of ``u`` and ``v`` by linear merge of sorted adjacency.

    If ``mask`` (a boolean array over edge ids) is given, only neighbors ``w``
    whose edges ``{u, w}`` and ``{v, w}`` are both included count.
    """
    a, ea = g.neighbors(u), g.incident_edges(u)
    b, eb = g.neighbors(v), g.incident_edges(v)
    i = j = 0
    out = []
    while i < a.shape[0] and j < b.shape[0]:
        if a[i] < b[j]:
            i += 1
        elif a[i] > b[j]:
            j += 1
        else:
            if mask is None or (mask[ea[i]] and mask[eb[j]]):
                out.append(int(a[i]))
            i += 1
            j += 1
    return out


def gnp_random_graph(n: int, p_edge: float, seed: int, confidence: Optional[tuple[float, float]] = None) -> ProbGraph:
    """Erdős–Rényi G(n, p) with optional uniform confidences in ``confidence``."""
    rng = np.random.default_rng(seed)
    pairs_total = n * (n - 1) // 2
    if pairs_total <= 4_000_000:
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.shape[0]) < p_edge
        edges = np.column_stack([iu[keep], ju[keep]])
    else:
        m = int(rng.binomial(pairs_total, p_edge))
        edges = _sample_distinct_pairs(n, m, rng)
    probs = None
    if confidence is not None:
        lo, hi = confidence
        probs = rng.uniform(lo, hi, size=edges.shape[0])
        probs[probs <= 0] = hi
    return from_edges(edges, probs, node_count=n)


def random_graph_mean_degree(n: int, mean_degree: float, seed: int) -> ProbGraph:
    """G(n, p) with ``p = mean_degree / (n - 1)``."""
    return gnp_random_graph(n, mean_degree / max(n - 1, 1), seed)


def _sample_distinct_pairs(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    keys = np.empty(0, dtype=np.int64)
    while keys.shape[0] < m:
        need = m - keys.shape[0]
        u = rng.integers(0, n, size=2 * need + 16)
        v = rng.integers(0, n, size=2 * need + 16)
        ok = u != v
        lo, hi = np.minimum(u[ok], v[ok]), np.maximum(u[ok], v[ok])
        keys = np.unique(np.concatenate([keys, lo * n + hi]))
    keys = rng.permutation(keys)[:m]
    keys.sort()
    return np.column_stack([keys // n, keys % n])
