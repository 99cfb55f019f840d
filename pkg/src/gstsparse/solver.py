"""Best-response edge sampling towards scaled local properties (GST).

Every edge is a player that toggles its inclusion whenever doing so lowers the
total distance of the current subgraph to the per-node expectations. Because
an edge only changes the counts of its endpoints and their common neighbors,
each player's gain equals the change of the global potential, so the dynamics
reach a Nash equilibrium. Rounds stop early once the per-round drop of the
total distance falls to the tolerance ``T``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .expectations import ScaledExpectations, compute_all
from .graph import ProbGraph

PROPERTIES = ("degree", "triangle", "wedge")
PROPERTY_SETS = {
    "2": frozenset({"degree"}),
    "23": frozenset({"degree", "triangle"}),
    "23w": frozenset({"degree", "triangle", "wedge"}),
}
_ALIASES = {"2": "degree", "3": "triangle", "w": "wedge"}

#: A flip is accepted only when its gain exceeds this value.
GAIN_EPS = 1e-12


def parse_properties(props) -> frozenset:
    """Accept ``"2"``, ``"23"``, ``"23w"`` or an iterable of property names."""
    if isinstance(props, str):
        if props in PROPERTY_SETS:
            return PROPERTY_SETS[props]
        props = [props]
    out = frozenset(_ALIASES.get(p, p) for p in props)
    if out not in PROPERTY_SETS.values():
        raise ValueError(f"unsupported property set {sorted(out)}; "
                         "use degree, degree+triangle or degree+triangle+wedge")
    return out


@dataclass(frozen=True)
class GstConfig:
    S: float
    T: float = 0.01
    properties: frozenset = PROPERTY_SETS["23w"]
    normalized: bool = True
    seed: int = 0
    max_rounds: int = 1000
    edge_order: str = "by-id"

    def __post_init__(self):
        object.__setattr__(self, "properties", parse_properties(self.properties))
        if not 0.0 <= self.S <= 1.0:
            raise ValueError(f"S must lie in [0, 1], got {self.S}")
        if self.T < 0:
            raise ValueError(f"T must be non-negative, got {self.T}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")
        if self.edge_order not in ("by-id", "shuffle"):
            raise ValueError(f"unknown edge order {self.edge_order!r}")

    @property
    def label(self) -> str:
        suffix = {"2": "2", "23": "2,3", "23w": "2,3,w"}[
            next(k for k, v in PROPERTY_SETS.items() if v == self.properties)]
        return f"{'GST' if self.normalized else 'UNGST'}_{suffix}"


@dataclass
class ConvergenceTrace:
    """Total distance after each round; entry 0 is the starting subgraph."""

    total_distance: list = field(default_factory=list)
    flips: list = field(default_factory=list)
    cumulative_seconds: list = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.total_distance) - 1

    def append(self, distance: float, flips: int, seconds: float) -> None:
        self.total_distance.append(float(distance))
        self.flips.append(int(flips))
        self.cumulative_seconds.append(float(seconds))

    def rows(self):
        return zip(range(len(self.total_distance)), self.total_distance, self.flips,
                   self.cumulative_seconds)


class SubgraphState:
    """Inclusion vector over the edges of ``graph`` plus per-node counts of the
    included subgraph (degree, triangles, centered wedges)."""

    def __init__(self, graph: ProbGraph, included: Optional[np.ndarray] = None):
        self.graph = graph
        if included is None:
            included = np.ones(graph.edge_count, dtype=np.bool_)
        self.included = np.array(included, dtype=np.bool_)
        self.cur_deg, self.cur_tri, self.cur_wedge = recount(graph, self.included)
        self._buf = np.empty(max(int(graph.degree().max(initial=0)), 1), dtype=np.int64)

    @property
    def included_edge_count(self) -> int:
        return int(self.included.sum())

    def counts(self) -> np.ndarray:
        return np.vstack([self.cur_deg, self.cur_tri, self.cur_wedge])

    def copy(self) -> "SubgraphState":
        other = object.__new__(SubgraphState)
        other.graph = self.graph
        other.included = self.included.copy()
        other.cur_deg = self.cur_deg.copy()
        other.cur_tri = self.cur_tri.copy()
        other.cur_wedge = self.cur_wedge.copy()
        other._buf = np.empty_like(self._buf)
        return other

    def is_consistent(self) -> bool:
        d, t, w = recount(self.graph, self.included)
        return (np.array_equal(d, self.cur_deg) and np.array_equal(t, self.cur_tri)
                and np.array_equal(w, self.cur_wedge))


def recount(g: ProbGraph, included: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full recount of degree, triangle and wedge counts from scratch.

    Uses sparse matrix products, independent of the merge-based updates.
    """
    n = g.node_count
    e = g.edges[np.asarray(included, dtype=bool)]
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    a = sp.csr_matrix((np.ones(rows.shape[0], dtype=np.int64), (rows, cols)), shape=(n, n))
    deg = np.asarray(a.sum(axis=1)).ravel().astype(np.int64)
    tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel().astype(np.int64) // 2
    wedge = deg * (deg - 1) // 2 - tri
    return deg, tri, wedge


def distance_weights(expectations: ScaledExpectations, properties: Iterable[str],
                     normalized: bool) -> np.ndarray:
    """``(3, n)`` per-term weights: ``1/cap`` (0 for a zero cap) when
    normalized, 1 otherwise, and 0 for properties not in the objective."""
    caps = expectations.caps().astype(np.float64)
    if normalized:
        w = np.divide(1.0, caps, out=np.zeros_like(caps), where=caps > 0)
    else:
        w = np.ones_like(caps)
    for i, name in enumerate(PROPERTIES):
        if name not in properties:
            w[i] = 0.0
    return w


def node_distance_terms(counts: np.ndarray, expected: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Weighted ``|m_l - E[m_l]|``; broadcasts over leading axes of ``counts``."""
    return weight * np.abs(counts - expected)


def node_distance(u: int, state: SubgraphState, expectations: ScaledExpectations,
                  l: str, normalized: bool = True) -> float:
    i = PROPERTIES.index(_ALIASES.get(l, l))
    cap = expectations.caps()[i, u]
    gap = abs(float(state.counts()[i, u]) - float(expectations.expected()[i, u]))
    if not normalized:
        return gap
    return 0.0 if cap == 0 else gap / cap


def node_distances(state: SubgraphState, expectations: ScaledExpectations,
                   config: GstConfig) -> np.ndarray:
    """Per-node distance summed over the configured properties."""
    w = distance_weights(expectations, config.properties, config.normalized)
    return node_distance_terms(state.counts(), expectations.expected(), w).sum(axis=0)


def total_distance(state: SubgraphState, expectations: ScaledExpectations, config: GstConfig) -> float:
    return float(node_distances(state, expectations, config).sum())


def affected_set(e: int, state: SubgraphState) -> set[int]:
    """Endpoints of ``e`` plus their common neighbors over included edges."""
    g = state.graph
    x, y = int(g.edges[e, 0]), int(g.edges[e, 1])
    c = _kernels.masked_common(g.indptr, g.nbr, g.adj_eid, state.included, x, y, state._buf)
    return {x, y, *map(int, state._buf[:c])}


def _kernel_args(state: SubgraphState):
    g = state.graph
    return (g.indptr, g.nbr, g.adj_eid, g.edges, state.included,
            state.cur_deg, state.cur_tri, state.cur_wedge)


def gain(e: int, state: SubgraphState, expectations: ScaledExpectations, config: GstConfig,
         weight: Optional[np.ndarray] = None) -> float:
    """Decrease of the total distance if edge ``e`` toggled its inclusion."""
    if weight is None:
        weight = distance_weights(expectations, config.properties, config.normalized)
    return float(_kernels.edge_gain(*_kernel_args(state), expectations.expected(), weight,
                                    int(e), state._buf))


def flip(e: int, state: SubgraphState) -> SubgraphState:
    """Toggle edge ``e`` in place, updating the affected counts; returns ``state``."""
    _kernels.flip_edge(*_kernel_args(state), int(e), state._buf)
    return state


@dataclass
class GstResult:
    included: np.ndarray
    trace: ConvergenceTrace
    status: str
    expectations: ScaledExpectations
    state: SubgraphState
    stage1_seconds: float
    stage2_seconds: float

    @property
    def rounds(self) -> int:
        return self.trace.rounds

    @property
    def flips(self) -> int:
        return int(sum(self.trace.flips))

    @property
    def final_distance(self) -> float:
        return self.trace.total_distance[-1]

    @property
    def edge_ratio(self) -> float:
        m = self.included.shape[0]
        return float(self.included.sum()) / m if m else 0.0

    def edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.included)


def run(g: ProbGraph, config: GstConfig, threads: Optional[int] = None,
        expectations: Optional[ScaledExpectations] = None) -> GstResult:
    """Sparsify ``g``.

    Starts from the full edge set and sweeps, round by round, every edge with
    an endpoint in the current frontier (initially all nodes). Flipped edges
    put their affected nodes into the next frontier. Stops when a round makes
    no flip (``"equilibrium"``), when round ``r >= 2`` lowers the distance by at
    most ``T`` (``"tolerance"``), or after ``max_rounds`` (``"max_rounds"``).

    ``expectations`` may be passed to skip the first stage.
    """
    t0 = time.perf_counter()
    if expectations is None:
        expectations = compute_all(g, config.S, threads=threads)
    stage1 = time.perf_counter() - t0

    t1 = time.perf_counter()
    state = SubgraphState(g)
    expected = expectations.expected()
    weight = distance_weights(expectations, config.properties, config.normalized)
    args = _kernel_args(state)
    rng = np.random.default_rng(config.seed)

    trace = ConvergenceTrace()
    trace.append(node_distance_terms(state.counts(), expected, weight).sum(), 0, 0.0)
    frontier = np.ones(g.node_count, dtype=np.bool_)
    nxt = np.zeros(g.node_count, dtype=np.bool_)
    order = np.arange(g.edge_count, dtype=np.int64)
    status = "max_rounds"
    for r in range(1, config.max_rounds + 1):
        if config.edge_order == "shuffle":
            order = rng.permutation(g.edge_count).astype(np.int64)
        cand = order[frontier[g.edges[order, 0]] | frontier[g.edges[order, 1]]]
        nxt[:] = False
        flips, _ = _kernels.sweep(*args, expected, weight, cand, GAIN_EPS, nxt, state._buf)
        dist = node_distance_terms(state.counts(), expected, weight).sum()
        trace.append(dist, flips, time.perf_counter() - t1)
        if flips == 0:
            status = "equilibrium"
            break
        if r >= 2 and trace.total_distance[r - 1] - trace.total_distance[r] <= config.T:
            status = "tolerance"
            break
        frontier, nxt = nxt, frontier
    stage2 = time.perf_counter() - t1

    return GstResult(state.included.copy(), trace, status, expectations, state, stage1, stage2)
