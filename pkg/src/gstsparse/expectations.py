"""Scaled expected degrees, triangles and wedges per node.

Each edge is kept independently with probability ``p(e) * S``. Degrees and
triangles follow from linearity of expectation; the wedge expectation needs
``E[deg^2]``, obtained from the exact degree distribution (a Poisson-binomial
convolution).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .graph import ProbGraph

#: Numerical slack for the non-negativity of expected wedges.
WEDGE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ScaledExpectations:
    """Per-node targets and structural caps for one scaling factor."""

    S: float
    ps: np.ndarray
    exp_deg: np.ndarray
    exp_tri: np.ndarray
    exp_wedge: np.ndarray
    cap_deg: np.ndarray
    cap_tri: np.ndarray
    cap_wedge: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.exp_deg.shape[0])

    def expected(self) -> np.ndarray:
        """``(3, n)`` array of expectations, rows degree/triangle/wedge."""
        return np.vstack([self.exp_deg, self.exp_tri, self.exp_wedge])

    def caps(self) -> np.ndarray:
        """``(3, n)`` integer array of caps, rows degree/triangle/wedge."""
        return np.vstack([self.cap_deg, self.cap_tri, self.cap_wedge])

    def check(self, tol: float = WEDGE_TOL) -> None:
        """Assert the range invariants ``0 <= E[m_l] <= |L_l|``."""
        for e, c, name in ((self.exp_deg, self.cap_deg, "degree"),
                           (self.exp_tri, self.cap_tri, "triangle"),
                           (self.exp_wedge, self.cap_wedge, "wedge")):
            if np.any(e < -tol) or np.any(e > c + tol):
                raise AssertionError(f"{name} expectation outside [0, cap]")
        if not np.all(np.isfinite(self.ps)):
            raise AssertionError("non-finite scaled contributions")

    def rows(self):
        """Yield ``(node, exp_deg, exp_tri, exp_wedge, cap_deg, cap_tri, cap_wedge)``."""
        for u in range(self.node_count):
            yield (u, float(self.exp_deg[u]), float(self.exp_tri[u]), float(self.exp_wedge[u]),
                   int(self.cap_deg[u]), int(self.cap_tri[u]), int(self.cap_wedge[u]))


def scaled_contributions(g: ProbGraph, S: float) -> np.ndarray:
    if not 0.0 <= S <= 1.0:
        raise ValueError(f"scaling factor must lie in [0, 1], got {S}")
    return g.p * S


def expected_degree(g: ProbGraph, ps: np.ndarray, u: int) -> float:
    total = 0.0
    for e in g.incident_edges(u):
        total += ps[e]
    return total


def _triangles_at(g: ProbGraph, u: int):
    """Yield ``(e_uv, e_ux, e_vx)`` for every triangle ``{u, v, x}``, ``v < x``."""
    nu, eu = g.neighbors(u), g.incident_edges(u)
    for a in range(nu.shape[0]):
        v = nu[a]
        nv, ev = g.neighbors(v), g.incident_edges(v)
        i, j = a + 1, 0
        while i < nu.shape[0] and j < nv.shape[0]:
            if nu[i] < nv[j]:
                i += 1
            elif nu[i] > nv[j]:
                j += 1
            else:
                yield eu[a], eu[i], ev[j]
                i += 1
                j += 1


def expected_triangles(g: ProbGraph, ps: np.ndarray, u: int) -> float:
    return sum(ps[a] * ps[b] * ps[c] for a, b, c in _triangles_at(g, u))


def degree_distribution_dp(contributions: Sequence[float]) -> np.ndarray:
    """Distribution of the number of successes among independent Bernoulli
    trials with the given success probabilities.

    >>> degree_distribution_dp([0.5, 0.5])
    array([0.25, 0.5 , 0.25])
    """
    probs = np.ones(1)
    for q in contributions:
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"contribution {q} outside [0, 1]")
        nxt = np.empty(probs.shape[0] + 1)
        nxt[:-1] = probs * (1.0 - q)
        nxt[-1] = 0.0
        nxt[1:] += probs * q
        probs = nxt
    return probs


def expected_wedges(g: ProbGraph, ps: np.ndarray, u: int, exp_deg_u: float, exp_tri_u: float) -> float:
    """Expected number of wedges centered at ``u``."""
    dist = degree_distribution_dp(ps[g.incident_edges(u)])
    k = np.arange(dist.shape[0])
    second_moment = float(np.sum(k * k * dist))
    return 0.5 * (second_moment - exp_deg_u) - exp_tri_u


def structural_caps(g: ProbGraph, u: int) -> tuple[int, int, int]:
    """Largest attainable ``(degree, triangles, wedges)`` of ``u`` over subgraphs.

    Any two neighbors of ``u`` form a wedge once their closing edge is dropped,
    so the wedge cap is ``C(deg, 2)``.
    """
    d = g.degree(u)
    t = sum(1 for _ in _triangles_at(g, u))
    return d, t, d * (d - 1) // 2


def default_threads() -> int:
    env = os.environ.get("GSTSPARSE_THREADS")
    return max(1, int(env)) if env else 1


def compute_all(g: ProbGraph, S: float, threads: Optional[int] = None) -> ScaledExpectations:
    """Expectations and caps for every node.

    ``threads`` > 1 splits the nodes into contiguous chunks evaluated
    concurrently (the kernel releases the GIL). Defaults to
    ``$GSTSPARSE_THREADS`` or 1.
    """
    ps = scaled_contributions(g, S)
    n = g.node_count
    exp_deg = np.zeros(n)
    exp_tri = np.zeros(n)
    exp_sq = np.zeros(n)
    cap_tri = np.zeros(n, dtype=np.int64)
    threads = default_threads() if threads is None else max(1, int(threads))

    args = (g.indptr, g.nbr, g.adj_eid, ps)
    outs = (exp_deg, exp_tri, exp_sq, cap_tri)
    nodes = np.arange(n, dtype=np.int64)
    if threads == 1 or n < 2 * threads:
        _kernels.node_expectations(*args, nodes, *outs)
    else:
        with ThreadPoolExecutor(threads) as pool:
            futs = [pool.submit(_kernels.node_expectations, *args, chunk, *outs)
                    for chunk in np.array_split(nodes, threads)]
            for f in futs:
                f.result()

    cap_deg = g.degree().astype(np.int64)
    exp_wedge = 0.5 * (exp_sq - exp_deg) - exp_tri
    return ScaledExpectations(
        S=float(S), ps=ps, exp_deg=exp_deg, exp_tri=exp_tri, exp_wedge=exp_wedge,
        cap_deg=cap_deg, cap_tri=cap_tri, cap_wedge=cap_deg * (cap_deg - 1) // 2,
    )
