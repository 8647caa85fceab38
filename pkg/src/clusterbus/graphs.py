# graphs.py
# The named matching graphs: the surface-code graph and its dual, the 2D
# decoding subgraphs, and the 3D cluster decoding graphs glued from an
# even/odd bulk graph and two decoding-layer copies.  Every edge carries a
# qubit site as label; edge subsets are dense bool vectors over the canonical
# edge index.
#
# Construction invariants the builders enforce:
#   - the even bulk graph keeps its u2 = 0 row of vertices; without it the
#     edge labeling fails to cover the bottom bulk qubits,
#   - for R = 3 the odd graph keeps its front-to-back axis edges even though
#     both endpoints are boundary vertices (their labels are bulk qubits),
#   - a vertex is internal iff it is not a dangling (degree-1) vertex of the
#     ambient glued graph and all its ambient incident edges lie in the
#     decoding graph.  This is exactly the "stabilizer fully measured"
#     criterion the syndrome construction needs.
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from .geometry import (
    PLANE_2D,
    LatticeParams,
    MeasurementPartition,
    Site,
    cluster_q1_q2,
    cluster_qubits,
    measurement_partition,
)

EdgeSet = np.ndarray  # bool vector, one entry per edge
VertexSet = np.ndarray  # bool vector, one entry per vertex (True only on internal)


class GraphError(ValueError):
    pass


class SizeMismatch(GraphError):
    pass


class NotACycle(GraphError):
    pass


@dataclass
class BoundaryGraph:
    """Finite graph with internal/external vertices and qubit-labeled edges.

    Vertices are sorted by (u3, u2, u1); edges by their canonical vertex-index
    pair.  `recovery` maps a set name (e.g. "L_X") to an edge bool vector.
    """

    name: str
    verts: Tuple[Site, ...]
    internal: np.ndarray
    edges: Tuple[Tuple[int, int], ...]
    labels: Tuple[Site, ...]
    recovery: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.vert_index = {v: i for i, v in enumerate(self.verts)}
        self.label_to_edge = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.label_to_edge) != len(self.labels):
            raise GraphError(f"{self.name}: duplicate edge labels")
        self.pair_to_edge = {e: i for i, e in enumerate(self.edges)}
        if len(self.pair_to_edge) != len(self.edges):
            raise GraphError(f"{self.name}: duplicate edges")
        self.ends0 = np.array([e[0] for e in self.edges], dtype=np.int64)
        self.ends1 = np.array([e[1] for e in self.edges], dtype=np.int64)
        adj: List[List[Tuple[int, int]]] = [[] for _ in self.verts]
        for i, (a, b) in enumerate(self.edges):
            if a == b or not (0 <= a < len(self.verts)) or not (0 <= b < len(self.verts)):
                raise GraphError(f"{self.name}: bad edge {i}")
            adj[a].append((i, b))
            adj[b].append((i, a))
        self.adjacency = adj
        self._csr_internal = None

    @property
    def n_verts(self) -> int:
        return len(self.verts)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def empty_edge_set(self) -> EdgeSet:
        return np.zeros(self.n_edges, dtype=bool)

    def empty_vertex_set(self) -> VertexSet:
        return np.zeros(self.n_verts, dtype=bool)

    def edge_set_from_labels(self, labels: Iterable[Site]) -> EdgeSet:
        es = self.empty_edge_set()
        for lab in labels:
            es[self.label_to_edge[lab]] = True
        return es

    def vertex_set_from_sites(self, sites: Iterable[Site]) -> VertexSet:
        vs = self.empty_vertex_set()
        for s in sites:
            vs[self.vert_index[s]] = True
        return vs

    def internal_csr(self):
        """Directed adjacency (scipy CSR) where only internal vertices have
        outgoing edges; used for matching-path BFS (external vertices absorb)."""
        if self._csr_internal is None:
            from scipy.sparse import csr_matrix

            rows, cols = [], []
            for i, (a, b) in enumerate(self.edges):
                if self.internal[a]:
                    rows.append(a)
                    cols.append(b)
                if self.internal[b]:
                    rows.append(b)
                    cols.append(a)
            n = max(self.n_verts, 1)
            self._csr_internal = csr_matrix(
                (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)
            )
        return self._csr_internal


def boundary(g: BoundaryGraph, es: EdgeSet) -> VertexSet:
    """Internal vertices on which an odd number of es-edges are incident."""
    if es.shape != (g.n_edges,):
        raise SizeMismatch(f"edge set of size {es.shape} on graph with {g.n_edges} edges")
    sel = np.flatnonzero(es)
    if sel.size == 0:
        return g.empty_vertex_set()
    counts = np.bincount(
        np.concatenate([g.ends0[sel], g.ends1[sel]]), minlength=g.n_verts
    )
    return (counts % 2 == 1) & g.internal


def pairing(a, b) -> int:
    """Parity of |a & b|.  Accepts two same-length bool vectors or two site
    collections."""
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        if a.shape != b.shape:
            raise SizeMismatch("pairing of differently indexed sets")
        return int(np.count_nonzero(a & b) & 1)
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        raise SizeMismatch("pairing mixes an indexed set with a site set")
    return len(frozenset(a) & frozenset(b)) & 1


# ---------------------------------------------------------------------------
# 2D surface-code graphs
# ---------------------------------------------------------------------------


def _midpoint(u: Site, v: Site) -> Site:
    return ((u[0] + v[0]) // 2, (u[1] + v[1]) // 2, (u[2] + v[2]) // 2)


def _surface_primal_sites(d: int):
    """T_sc vertex/edge site lists; vertical edges on the rough left/right
    columns (u1 in {0, 2d}) are excluded."""
    verts = [
        (u1, u2, PLANE_2D)
        for u1 in range(0, 2 * d + 1, 2)
        for u2 in range(0, 2 * d - 1, 2)
    ]
    dangling = {v for v in verts if v[0] in (0, 2 * d)}
    edges = []
    for (u1, u2, _) in verts:
        if u1 + 2 <= 2 * d:
            edges.append(((u1, u2, PLANE_2D), (u1 + 2, u2, PLANE_2D)))
        if u2 + 2 <= 2 * d - 2 and u1 not in (0, 2 * d):
            edges.append(((u1, u2, PLANE_2D), (u1, u2 + 2, PLANE_2D)))
    return verts, dangling, edges


def _surface_dual_sites(d: int):
    """T_sc* vertex/edge site lists; horizontal edges on the rough top/bottom
    rows (u2 in {-1, 2d-1}) are excluded."""
    verts = [
        (u1, u2, PLANE_2D)
        for u1 in range(1, 2 * d, 2)
        for u2 in range(-1, 2 * d, 2)
    ]
    dangling = {v for v in verts if v[1] in (-1, 2 * d - 1)}
    edges = []
    for (u1, u2, _) in verts:
        if u2 + 2 <= 2 * d - 1:
            edges.append(((u1, u2, PLANE_2D), (u1, u2 + 2, PLANE_2D)))
        if u1 + 2 <= 2 * d - 1 and u2 not in (-1, 2 * d - 1):
            edges.append(((u1, u2, PLANE_2D), (u1 + 2, u2, PLANE_2D)))
    return verts, dangling, edges


def _assemble(
    name: str,
    vert_sites: Iterable[Site],
    internal_sites: Iterable[Site],
    edge_items: Iterable[Tuple[Site, Site, Site]],
    recovery_labels: Dict[str, Iterable[Site]] | None = None,
) -> BoundaryGraph:
    verts = tuple(sorted(set(vert_sites), key=lambda s: (s[2], s[1], s[0])))
    vidx = {v: i for i, v in enumerate(verts)}
    internal = np.zeros(len(verts), dtype=bool)
    for s in internal_sites:
        internal[vidx[s]] = True
    raw = []
    for (a, b, lab) in edge_items:
        i, j = vidx[a], vidx[b]
        raw.append(((min(i, j), max(i, j)), lab))
    raw.sort(key=lambda t: t[0])
    edges = tuple(p for p, _ in raw)
    if len(set(edges)) != len(edges):
        raise GraphError(f"{name}: duplicate edges")
    labels = tuple(lab for _, lab in raw)
    g = BoundaryGraph(name, verts, internal, edges, labels)
    if recovery_labels:
        for key, labs in recovery_labels.items():
            g.recovery[key] = g.edge_set_from_labels(labs)
    return g


def build_surface(params: LatticeParams) -> Tuple[BoundaryGraph, BoundaryGraph]:
    """The full surface-code graph T_sc and its dual T_sc*.  No internal
    vertices are flagged; internality belongs to the decoding subgraphs."""
    d = params.d
    pv, _, pe = _surface_primal_sites(d)
    dv, _, de = _surface_dual_sites(d)
    tsc = _assemble("T_sc", pv, (), ((a, b, _midpoint(a, b)) for a, b in pe))
    tsc_dual = _assemble("T_sc*", dv, (), ((a, b, _midpoint(a, b)) for a, b in de))
    return tsc, tsc_dual


def _induced(
    name: str,
    all_edges: Sequence[Tuple[Site, Site]],
    dangling: FrozenSet[Site] | set,
    keep_labels: FrozenSet[Site],
    recovery_labels: Dict[str, Iterable[Site]],
) -> BoundaryGraph:
    """Edge-induced subgraph with the normative internal-vertex criterion,
    where `all_edges` is the ambient graph's edge list."""
    ambient_inc: Dict[Site, List[Site]] = {}
    for a, b in all_edges:
        lab = _midpoint(a, b)
        ambient_inc.setdefault(a, []).append(lab)
        ambient_inc.setdefault(b, []).append(lab)
    kept = [(a, b) for a, b in all_edges if _midpoint(a, b) in keep_labels]
    vert_sites = {a for a, _ in kept} | {b for _, b in kept}
    internal = [
        v
        for v in vert_sites
        if v not in dangling
        and len(ambient_inc[v]) >= 2
        and all(lab in keep_labels for lab in ambient_inc[v])
    ]
    return _assemble(
        name,
        vert_sites,
        internal,
        ((a, b, _midpoint(a, b)) for a, b in kept),
        recovery_labels,
    )


def surface_recovery_x_labels(d: int) -> List[Site]:
    return [(1, u2, PLANE_2D) for u2 in range(2, 2 * d - 1, 2)]


def surface_recovery_z_labels(d: int) -> List[Site]:
    return [(u1, 0, PLANE_2D) for u1 in range(3, 2 * d, 2)]


def build_surface_decoding(
    params: LatticeParams,
) -> Tuple[BoundaryGraph, BoundaryGraph]:
    """T_dec (edges = X-measured qubits of T_sc) and T_dec* (edges = Z-measured
    qubits of T_sc*), with recovery sets L_X and L_Z* attached."""
    d = params.d
    part = measurement_partition("surface", params)
    _, pd_dangling, pe = _surface_primal_sites(d)
    _, dd_dangling, de = _surface_dual_sites(d)
    tdec = _induced("T_dec", pe, pd_dangling, part.set_x, {"L_X": surface_recovery_x_labels(d)})
    tdec_dual = _induced(
        "T_dec*", de, dd_dangling, part.set_z, {"L_Z*": surface_recovery_z_labels(d)}
    )
    return tdec, tdec_dual


# ---------------------------------------------------------------------------
# 3D cluster decoding graphs
# ---------------------------------------------------------------------------


def _even_graph_sites(d: int, r: int):
    """Vertices and edges of the even bulk graph T_even.

    The bulk vertex rows at u2 = 0 are kept (the labeling bijection onto the
    bulk qubits requires them); dangling vertices sit on the rough left/right
    faces u1 in {0, 2d}.
    """
    bulk = {
        (u1, u2, u3)
        for u1 in range(2, 2 * d - 1, 2)
        for u2 in range(0, 2 * d - 1, 2)
        for u3 in range(2, r, 2)
    }
    sheet = {
        (u1, u2, u3)
        for u1 in range(2, 2 * d - 1, 2)
        for u2 in range(0, 2 * d - 1, 2)
        for u3 in (1, r)
    }
    rough = {
        (u1, u2, u3)
        for u1 in (0, 2 * d)
        for u2 in range(0, 2 * d - 1, 2)
        for u3 in range(2, r, 2)
    }
    verts = bulk | sheet | rough
    prime = sheet | rough  # boundary vertex classes
    edges = []
    for v in verts:
        for axis, step in ((0, 2), (1, 2), (2, 2)):
            w = list(v)
            w[axis] += step
            w = tuple(w)
            if w in verts and not (v in prime and w in prime):
                edges.append((v, w))
        # distance-1 edges from the glue sheets into the bulk
        if v[2] == 1 and (v[0], v[1], 2) in verts:
            edges.append((v, (v[0], v[1], 2)))
        if v[2] == r and (v[0], v[1], r - 1) in verts:
            edges.append((v, (v[0], v[1], r - 1)))
    return verts, prime, rough, edges


def _odd_graph_sites(d: int, r: int, qubits: FrozenSet[Site]):
    """Vertices and edges of the odd bulk graph T_odd (dual sites).

    Front/back boundary pairs along the bus axis keep their edge when the
    midpoint is a qubit; this only fires at R = 3 where the front and back
    sheets are at distance 2.
    """
    rr = 2 * d - 1  # top dual row coordinate
    bulk = {
        (u1, u2, u3)
        for u1 in range(1, 2 * d, 2)
        for u2 in range(1, 2 * d - 2, 2)
        for u3 in range(3, r - 1, 2)
    }
    sheet = {
        (u1, u2, u3)
        for u1 in range(1, 2 * d, 2)
        for u2 in range(1, 2 * d - 2, 2)
        for u3 in (1, r)
    }
    rough = {
        (u1, u2, u3)
        for u1 in range(1, 2 * d, 2)
        for u2 in (-1, rr)
        for u3 in range(3, r - 1, 2)
    }
    verts = bulk | sheet | rough
    prime = sheet | rough
    edges = []
    for v in verts:
        for axis in (0, 1, 2):
            w = list(v)
            w[axis] += 2
            w = tuple(w)
            if w not in verts:
                continue
            both_prime = v in prime and w in prime
            if not both_prime:
                edges.append((v, w))
            elif axis == 2 and _midpoint(v, w) in qubits:
                edges.append((v, w))
    return verts, prime, rough, edges


def _lift(edges2d, layer: int):
    return [
        ((a[0], a[1], layer), (b[0], b[1], layer)) for a, b in edges2d
    ]


def _even_label(a: Site, b: Site, r: int) -> Site:
    """Labeling map on T_even / glued edges: midpoint for distance-2 edges,
    the sheet endpoint for distance-1 edges."""
    dist = abs(a[0] - b[0]) + abs(a[1] - b[1]) + abs(a[2] - b[2])
    if dist == 2:
        return _midpoint(a, b)
    if {a[2], b[2]} == {1, 2}:
        return (a[0], a[1], 1)
    if {a[2], b[2]} == {r - 1, r}:
        return (a[0], a[1], r)
    raise GraphError(f"unlabelable edge {a}-{b}")


def cluster_recovery_x_labels(d: int, r: int) -> Dict[str, List[Site]]:
    """L_cl,X: left-face dangling edges.  The boundary part is L_X x {1, R};
    the bulk part is the full left column at even u3 (including u2 = 0, which
    has no analogue of the unmeasured corner qubit)."""
    bpart = [(1, u2, u3) for u2 in range(2, 2 * d - 1, 2) for u3 in (1, r)]
    apart = [
        (1, u2, u3) for u2 in range(0, 2 * d - 1, 2) for u3 in range(2, r, 2)
    ]
    return {"L_cl,X": bpart + apart, "L_cl,X&A": apart, "L_cl,X&B": bpart}


def cluster_recovery_z_labels(d: int, r: int) -> Dict[str, List[Site]]:
    """L_cl,Z*: bottom-face dangling edges (o,0,o), minus the distinguished
    qubits; the bulk part keeps u1 = 1."""
    q1, q2 = (1, 0, 1), (1, 0, r)
    bpart = [
        (u1, 0, u3)
        for u1 in range(1, 2 * d, 2)
        for u3 in (1, r)
        if (u1, 0, u3) not in (q1, q2)
    ]
    apart = [
        (u1, 0, u3) for u1 in range(1, 2 * d, 2) for u3 in range(3, r - 1, 2)
    ]
    return {"L_cl,Z*": bpart + apart, "L_cl,Z*&A": apart, "L_cl,Z*&B": bpart}


def _glued_internal(
    sub_edges: Dict[Site, List[Site]],
    ambient_inc: Dict[Site, List[Site]],
    sub_labels: set,
) -> List[Site]:
    out = []
    for v, inc in ambient_inc.items():
        if v in sub_edges and len(inc) >= 2 and all(lab in sub_labels for lab in inc):
            out.append(v)
    return out


def build_cluster_decoding(
    params: LatticeParams,
) -> Tuple[BoundaryGraph, BoundaryGraph]:
    """T_cl,dec = T_even glued with two T_dec copies (u3 in {1, R}) and
    T_cl,dec* = T_odd glued with two T_dec* copies, with labeling map and
    recovery sets attached."""
    if not params.is_cluster:
        raise GraphError("cluster decoding graphs require R")
    d, r = params.d, params.r
    qubits = cluster_qubits(params)
    part = measurement_partition("cluster", params)
    p2 = LatticeParams(d)

    # primal side -----------------------------------------------------------
    _, prime_e, _, even_edges = _even_graph_sites(d, r)
    _, sc_dangling, sc_edges = _surface_primal_sites(d)
    ambient_edges = [(a, b) for a, b in even_edges]
    for layer in (1, r):
        ambient_edges += _lift(sc_edges, layer)
    x2d = measurement_partition("surface", p2).set_x
    keep = {lab for lab in (_even_label(a, b, r) for a, b in even_edges)}
    keep |= {(u1, u2, layer) for (u1, u2, _) in x2d for layer in (1, r)}
    tcl_dec = _build_glued(
        "T_cl,dec",
        ambient_edges,
        keep,
        dangling_sites={(u1, u2, u3) for (u1, u2, _) in sc_dangling for u3 in (1, r)}
        | {v for v in prime_e if v[0] in (0, 2 * d) and v[2] % 2 == 0},
        r=r,
        recovery_labels=cluster_recovery_x_labels(d, r),
    )

    # dual side --------------------------------------------------------------
    _, prime_o, _, odd_edges = _odd_graph_sites(d, r, qubits)
    _, scd_dangling, scd_edges = _surface_dual_sites(d)
    ambient_edges_d = [(a, b) for a, b in odd_edges]
    for layer in (1, r):
        ambient_edges_d += _lift(scd_edges, layer)
    z2d = measurement_partition("surface", p2).set_z
    keep_d = {_midpoint(a, b) for a, b in odd_edges}
    keep_d |= {(u1, u2, layer) for (u1, u2, _) in z2d for layer in (1, r)}
    tcl_dec_dual = _build_glued(
        "T_cl,dec*",
        ambient_edges_d,
        keep_d,
        dangling_sites={(u1, u2, u3) for (u1, u2, _) in scd_dangling for u3 in (1, r)}
        | {v for v in prime_o if v[1] in (-1, 2 * d - 1)},
        r=r,
        recovery_labels=cluster_recovery_z_labels(d, r),
    )

    # the labeling map must biject onto the measured qubits
    lab_union = set(tcl_dec.labels) | set(tcl_dec_dual.labels)
    expected = qubits - set(cluster_q1_q2(params))
    if len(tcl_dec.labels) + len(tcl_dec_dual.labels) != len(lab_union) or lab_union != expected:
        raise GraphError("labeling map is not a bijection onto the measured qubits")
    _check_partition_split(tcl_dec, part, "L_cl,X")
    _check_partition_split(tcl_dec_dual, part, "L_cl,Z*")
    return tcl_dec, tcl_dec_dual


def _check_partition_split(g: BoundaryGraph, part: MeasurementPartition, key: str):
    a_mask = g.edge_set_from_labels(
        [lab for lab in g.labels if lab in part.set_a]
    )
    full = g.recovery[key]
    if not np.array_equal(full, g.recovery[key + "&A"] | g.recovery[key + "&B"]):
        raise GraphError(f"{g.name}: recovery split does not assemble {key}")
    if np.any(g.recovery[key + "&A"] & ~a_mask) or np.any(g.recovery[key + "&B"] & a_mask):
        raise GraphError(f"{g.name}: recovery split disagrees with the partition")


def _build_glued(
    name: str,
    ambient_edges: List[Tuple[Site, Site]],
    keep_labels: set,
    dangling_sites: set,
    r: int,
    recovery_labels: Dict[str, Iterable[Site]],
) -> BoundaryGraph:
    ambient_inc: Dict[Site, List[Site]] = {}
    labeled = []
    for a, b in ambient_edges:
        lab = _even_label(a, b, r)
        labeled.append((a, b, lab))
        ambient_inc.setdefault(a, []).append(lab)
        ambient_inc.setdefault(b, []).append(lab)
    kept = [(a, b, lab) for a, b, lab in labeled if lab in keep_labels]
    vert_sites = {a for a, _, _ in kept} | {b for _, b, _ in kept}
    internal = [
        v
        for v in vert_sites
        if v not in dangling_sites
        and len(ambient_inc[v]) >= 2
        and all(lab in keep_labels for lab in ambient_inc[v])
    ]
    return _assemble(name, vert_sites, internal, kept, recovery_labels)


# ---------------------------------------------------------------------------
# cycle decomposition
# ---------------------------------------------------------------------------


def _find_simple_loop(g: BoundaryGraph, remaining: np.ndarray) -> List[int] | None:
    adj: List[List[Tuple[int, int]]] = [[] for _ in range(g.n_verts)]
    for i in np.flatnonzero(remaining):
        a, b = g.edges[i]
        adj[a].append((i, b))
        adj[b].append((i, a))
    explored = np.zeros(g.n_verts, dtype=bool)
    for root in range(g.n_verts):
        if explored[root] or not adj[root]:
            continue
        path_v, path_e = [root], []
        onpath = {root: 0}
        iters = [iter(adj[root])]
        while iters:
            try:
                e, w = next(iters[-1])
            except StopIteration:
                iters.pop()
                explored[path_v[-1]] = True
                if path_e:
                    path_e.pop()
                    del onpath[path_v.pop()]
                continue
            if path_e and e == path_e[-1]:
                continue
            if w in onpath:
                return path_e[onpath[w]:] + [e]
            if explored[w]:
                continue
            onpath[w] = len(path_v)
            path_v.append(w)
            path_e.append(e)
            iters.append(iter(adj[w]))
    return None


def classify_part(g: BoundaryGraph, part: EdgeSet) -> str:
    """Return "loop" or "ext-path"; raise GraphError if the part is neither a
    simple closed loop nor a simple external-to-external path through internal
    vertices."""
    sel = np.flatnonzero(part)
    if sel.size == 0:
        raise GraphError("empty part")
    deg: Dict[int, int] = {}
    for i in sel:
        for v in g.edges[i]:
            deg[v] = deg.get(v, 0) + 1
    # connectivity walk
    seen_edges = {sel[0]}
    stack = list(g.edges[sel[0]])
    sel_set = set(int(i) for i in sel)
    seen_v = set(g.edges[sel[0]])
    while stack:
        v = stack.pop()
        for (i, w) in g.adjacency[v]:
            if i in sel_set and i not in seen_edges:
                seen_edges.add(i)
                if w not in seen_v:
                    seen_v.add(w)
                    stack.append(w)
    if len(seen_edges) != sel.size:
        raise GraphError("part is disconnected")
    ends = [v for v, k in deg.items() if k == 1]
    mids = [v for v, k in deg.items() if k == 2]
    if len(ends) + len(mids) != len(deg):
        raise GraphError("part has a vertex of degree > 2")
    if not ends:
        return "loop"
    if len(ends) == 2 and all(not g.internal[v] for v in ends) and all(
        g.internal[v] for v in mids
    ):
        return "ext-path"
    raise GraphError("part is neither a simple loop nor an external path")


def cycle_decompose(g: BoundaryGraph, cyc: EdgeSet) -> List[EdgeSet]:
    """Split a boundaryless edge set into pairwise-disjoint simple closed loops
    and simple external-to-external paths through internal vertices."""
    if np.any(boundary(g, cyc)):
        raise NotACycle("edge set has nonempty boundary")
    remaining = cyc.copy()
    parts: List[EdgeSet] = []
    while True:
        loop = _find_simple_loop(g, remaining)
        if loop is None:
            break
        es = g.empty_edge_set()
        es[loop] = True
        remaining &= ~es
        parts.append(es)
    # remaining is acyclic with empty boundary: peel external-to-external paths
    deg = np.zeros(g.n_verts, dtype=np.int64)
    for i in np.flatnonzero(remaining):
        a, b = g.edges[i]
        deg[a] += 1
        deg[b] += 1
    while np.any(remaining):
        starts = np.flatnonzero((deg > 0) & ~g.internal)
        if starts.size == 0:
            raise GraphError("acyclic remainder without external endpoints")
        v = int(starts[0])
        es = g.empty_edge_set()
        while True:
            nxt = min(
                (i, w) for (i, w) in g.adjacency[v] if remaining[i]
            )
            i, w = nxt
            es[i] = True
            remaining[i] = False
            deg[v] -= 1
            deg[w] -= 1
            v = w
            if not g.internal[v]:
                break
        parts.append(es)
    for p in parts:
        classify_part(g, p)  # structural guarantee
    return parts


# ---------------------------------------------------------------------------
# debug dump
# ---------------------------------------------------------------------------


def dump_graph(g: BoundaryGraph) -> str:
    lines = []
    for i, v in enumerate(g.verts):
        kind = "int" if g.internal[i] else "ext"
        lines.append(f"V {i} {v[0]} {v[1]} {v[2]} {kind}")
    for i, ((a, b), lab) in enumerate(zip(g.edges, g.labels)):
        lines.append(f"E {i} {a} {b} {lab[0]} {lab[1]} {lab[2]}")
    for name in sorted(g.recovery):
        idxs = " ".join(str(int(i)) for i in np.flatnonzero(g.recovery[name]))
        lines.append(f"R {name} {idxs}".rstrip())
    return "\n".join(lines) + "\n"
