"""Compiled inner loops over CSR adjacency.

All kernels take the raw arrays of a :class:`~gstsparse.graph.ProbGraph`
(``indptr``, ``nbr``, ``adj_eid``) so they can run without the GIL.
"""

import numpy as np
from numba import njit

DEG, TRI, WEDGE = 0, 1, 2


@njit(nogil=True, cache=True)
def node_expectations(indptr, nbr, eid, ps, nodes, exp_deg, exp_tri, exp_sq, cap_tri):
    """Fill per-node expected degree, expected triangles, E[deg^2] and the
    triangle count of the full graph for every node in ``nodes``."""
    dp = np.empty(1, dtype=np.float64)
    for u in nodes:
        lo, hi = indptr[u], indptr[u + 1]
        d = hi - lo
        s = 0.0
        for a in range(lo, hi):
            s += ps[eid[a]]
        exp_deg[u] = s

        t = 0.0
        c = 0
        for a in range(lo, hi):
            v = nbr[a]
            puv = ps[eid[a]]
            # merge neighbors of u after v with neighbors of v
            i = a + 1
            j = indptr[v]
            jend = indptr[v + 1]
            while i < hi and j < jend:
                if nbr[i] < nbr[j]:
                    i += 1
                elif nbr[i] > nbr[j]:
                    j += 1
                else:
                    t += puv * ps[eid[i]] * ps[eid[j]]
                    c += 1
                    i += 1
                    j += 1
        exp_tri[u] = t
        cap_tri[u] = c

        if dp.shape[0] < d + 1:
            dp = np.empty(d + 1, dtype=np.float64)
        dp[0] = 1.0
        for k in range(d):
            q = ps[eid[lo + k]]
            dp[k + 1] = dp[k] * q
            for j in range(k, 0, -1):
                dp[j] = dp[j] * (1.0 - q) + dp[j - 1] * q
            dp[0] = dp[0] * (1.0 - q)
        sq = 0.0
        for k in range(1, d + 1):
            sq += k * k * dp[k]
        exp_sq[u] = sq


@njit(nogil=True, cache=True)
def masked_common(indptr, nbr, eid, included, x, y, out):
    """Write the common neighbors of ``x`` and ``y`` over included edges into
    ``out``; return how many were written."""
    i, iend = indptr[x], indptr[x + 1]
    j, jend = indptr[y], indptr[y + 1]
    c = 0
    while i < iend and j < jend:
        if nbr[i] < nbr[j]:
            i += 1
        elif nbr[i] > nbr[j]:
            j += 1
        else:
            if included[eid[i]] and included[eid[j]]:
                out[c] = nbr[i]
                c += 1
            i += 1
            j += 1
    return c


@njit(nogil=True, cache=True, inline="always")
def _dist(u, d, t, w, expected, weight):
    return (weight[DEG, u] * abs(d - expected[DEG, u])
            + weight[TRI, u] * abs(t - expected[TRI, u])
            + weight[WEDGE, u] * abs(w - expected[WEDGE, u]))


@njit(nogil=True, cache=True)
def edge_gain(indptr, nbr, eid, edges, included, cur_deg, cur_tri, cur_wedge,
              expected, weight, e, buf):
    """Distance decrease caused by toggling edge ``e``; state is not modified."""
    x = edges[e, 0]
    y = edges[e, 1]
    c = masked_common(indptr, nbr, eid, included, x, y, buf)
    delta = -1 if included[e] else 1
    g = 0.0
    for u in (x, y):
        d = cur_deg[u]
        t = cur_tri[u]
        nd = d + delta
        nt = t + delta * c
        nw = nd * (nd - 1) // 2 - nt
        g += _dist(u, d, t, cur_wedge[u], expected, weight) - _dist(u, nd, nt, nw, expected, weight)
    for k in range(c):
        w = buf[k]
        d = cur_deg[w]
        t = cur_tri[w]
        g += (_dist(w, d, t, cur_wedge[w], expected, weight)
              - _dist(w, d, t + delta, cur_wedge[w] - delta, expected, weight))
    return g


@njit(nogil=True, cache=True)
def flip_edge(indptr, nbr, eid, edges, included, cur_deg, cur_tri, cur_wedge, e, buf):
    """Toggle edge ``e`` and update counts of the affected nodes.

    Returns the number of common neighbors written to ``buf``.
    """
    x = edges[e, 0]
    y = edges[e, 1]
    c = masked_common(indptr, nbr, eid, included, x, y, buf)
    delta = -1 if included[e] else 1
    included[e] = not included[e]
    for u in (x, y):
        cur_deg[u] += delta
        cur_tri[u] += delta * c
        d = cur_deg[u]
        cur_wedge[u] = d * (d - 1) // 2 - cur_tri[u]
    for k in range(c):
        w = buf[k]
        cur_tri[w] += delta
        cur_wedge[w] -= delta
    return c


@njit(nogil=True, cache=True)
def sweep(indptr, nbr, eid, edges, included, cur_deg, cur_tri, cur_wedge,
          expected, weight, candidates, eps, next_frontier, buf):
    """One best-response round over ``candidates`` (edge ids, in order).

    Flips every edge whose gain exceeds ``eps`` and marks its affected nodes in
    ``next_frontier``. Returns ``(flips, total_gain)``.
    """
    flips = 0
    total = 0.0
    for k in range(candidates.shape[0]):
        e = candidates[k]
        g = edge_gain(indptr, nbr, eid, edges, included, cur_deg, cur_tri, cur_wedge,
                      expected, weight, e, buf)
        if g > eps:
            c = flip_edge(indptr, nbr, eid, edges, included, cur_deg, cur_tri, cur_wedge, e, buf)
            next_frontier[edges[e, 0]] = True
            next_frontier[edges[e, 1]] = True
            # for insertions the mask after the flip equals the mask before
            # on {x,w},{y,w}, so buf is L(e) either way
            for j in range(c):
                next_frontier[buf[j]] = True
            flips += 1
            total += g
    return flips, total
