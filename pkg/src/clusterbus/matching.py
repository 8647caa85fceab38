# matching.py
# Minimum matchings of marked internal vertices on a BoundaryGraph: an edge
# set whose boundary equals the marked set, of minimum cardinality.
#
# min_match reduces to a blossom max-weight matching on a pruned graph:
# with pi_v = distance from marked vertex v to the nearest external vertex
# (paths through internal vertices only), pairing v straight to the boundary
# costs pi_v.  A pair (a, b) is worth keeping only when the direct internal
# path is strictly cheaper, i.e. dist(a, b) < pi_a + pi_b.  Maximizing the
# total saving pi_a + pi_b - dist(a, b) over an ordinary (non-perfect)
# matching of those pairs is exactly equivalent to the textbook reduction
# with per-vertex virtual boundary nodes, and keeps the blossom instance
# small even for dense syndromes.
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import shortest_path

from .graphs import BoundaryGraph, EdgeSet, VertexSet, boundary

BRUTE_FORCE_EDGE_CAP = 24


class MatchingError(ValueError):
    pass


class InfeasibleMatching(MatchingError):
    pass


class TooLarge(MatchingError):
    pass


@dataclass
class MatchRequest:
    graph: BoundaryGraph
    marked: VertexSet

    def __post_init__(self):
        if self.marked.shape != (self.graph.n_verts,):
            raise MatchingError("marked set sized for a different graph")
        if np.any(self.marked & ~self.graph.internal):
            raise MatchingError("marked set touches external vertices")


def _xor_path(g: BoundaryGraph, pred_row: np.ndarray, src: int, dst: int, out: EdgeSet):
    v = dst
    while v != src:
        u = int(pred_row[v])
        if u < 0:
            raise MatchingError("broken predecessor chain")
        out[g.pair_to_edge[(min(u, v), max(u, v))]] ^= True
        v = u


def min_match(req: MatchRequest) -> EdgeSet:
    g = req.graph
    marked = np.flatnonzero(req.marked)
    result = g.empty_edge_set()
    if marked.size == 0:
        return result

    dist, pred = shortest_path(
        g.internal_csr(),
        method="D",
        directed=True,
        unweighted=True,
        indices=marked,
        return_predecessors=True,
    )
    ext_cols = np.flatnonzero(~g.internal)
    if ext_cols.size == 0:
        raise InfeasibleMatching(f"{g.name}: no external vertices to absorb defects")
    ext_dist = dist[:, ext_cols]
    which = np.argmin(ext_dist, axis=1)
    pi = ext_dist[np.arange(marked.size), which]
    if np.any(np.isinf(pi)):
        raise InfeasibleMatching(f"{g.name}: marked vertex cannot reach the boundary")
    targets = ext_cols[which]

    gm = nx.Graph()
    gm.add_nodes_from(range(marked.size))
    for a, b in combinations(range(marked.size), 2):
        d_ab = dist[a, marked[b]]
        if d_ab < pi[a] + pi[b]:
            gm.add_edge(a, b, weight=int(pi[a] + pi[b] - d_ab))
    mate = nx.max_weight_matching(gm, maxcardinality=False)

    seen = np.zeros(marked.size, dtype=bool)
    for a, b in sorted((min(p), max(p)) for p in mate):
        seen[a] = seen[b] = True
        _xor_path(g, pred[a], int(marked[a]), int(marked[b]), result)
    for a in np.flatnonzero(~seen):
        _xor_path(g, pred[a], int(marked[a]), int(targets[a]), result)

    check = boundary(g, result)
    if not np.array_equal(check, req.marked):
        raise MatchingError(f"{g.name}: matched set has wrong boundary")
    return result


def brute_force_min_match(req: MatchRequest) -> EdgeSet:
    """Exhaustive oracle: scan edge subsets by increasing cardinality, then in
    lexicographic edge-index order, and return the first whose boundary equals
    the marked set."""
    g = req.graph
    if g.n_edges > BRUTE_FORCE_EDGE_CAP:
        raise TooLarge(f"{g.name}: {g.n_edges} edges exceeds the brute-force cap")
    target = 0
    for v in np.flatnonzero(req.marked):
        target |= 1 << int(v)
    edge_bnd = []
    for a, b in g.edges:
        m = 0
        if g.internal[a]:
            m |= 1 << int(a)
        if g.internal[b]:
            m |= 1 << int(b)
        edge_bnd.append(m)
    for k in range(g.n_edges + 1):
        for combo in combinations(range(g.n_edges), k):
            acc = 0
            for i in combo:
                acc ^= edge_bnd[i]
            if acc == target:
                out = g.empty_edge_set()
                out[list(combo)] = True
                return out
    raise InfeasibleMatching(f"{g.name}: no edge subset matches the marked set")
