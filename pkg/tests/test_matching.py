import numpy as np
import pytest

from clusterbus.graphs import BoundaryGraph, boundary
from clusterbus.matching import (
    MatchingError,
    MatchRequest,
    TooLarge,
    brute_force_min_match,
    min_match,
)


def make_path_graph(n_edges, internal_mask):
    """Path graph v0 - v1 - ... - vn with synthetic labels."""
    verts = tuple((i, 0, 0) for i in range(n_edges + 1))
    internal = np.array(internal_mask, dtype=bool)
    edges = tuple((i, i + 1) for i in range(n_edges))
    labels = tuple((2 * i + 1, 1, 0) for i in range(n_edges))
    return BoundaryGraph("path", verts, internal, edges, labels)


def test_empty_marked(surface_d3):
    g = surface_d3.tdec
    out = min_match(MatchRequest(g, g.empty_vertex_set()))
    assert not out.any()
    assert not brute_force_min_match(MatchRequest(g, g.empty_vertex_set())).any()


def test_single_marked_d3(surface_d3):
    g = surface_d3.tdec
    marked = g.vertex_set_from_sites([(2, 4, 0)])
    out = min_match(MatchRequest(g, marked))
    assert out.sum() == 1
    assert np.array_equal(boundary(g, out), marked)
    assert brute_force_min_match(MatchRequest(g, marked)).sum() == 1


def test_adjacent_marked_pair():
    # 3x3 even-sublattice strip: two adjacent internal vertices match through
    # the single connecting edge
    verts = tuple((2 * i, 0, 0) for i in range(4))
    internal = np.array([False, True, True, False])
    edges = ((0, 1), (1, 2), (2, 3))
    labels = ((1, 0, 0), (3, 0, 0), (5, 0, 0))
    g = BoundaryGraph("strip", verts, internal, edges, labels)
    marked = g.vertex_set_from_sites([(2, 0, 0), (4, 0, 0)])
    out = min_match(MatchRequest(g, marked))
    assert out.sum() == 1 and out[1]
    assert np.array_equal(out, brute_force_min_match(MatchRequest(g, marked)))


def test_path_graph_shorter_segment():
    # 5-edge path, external endpoints; a single marked vertex matches to the
    # nearer end
    g = make_path_graph(5, [False, True, True, True, True, False])
    marked = g.empty_vertex_set()
    marked[1] = True
    out = min_match(MatchRequest(g, marked))
    ref = brute_force_min_match(MatchRequest(g, marked))
    assert out.sum() == ref.sum() == 1
    assert out[0]  # the one-edge segment to the left end


def test_matches_brute_force_random(surface_d3):
    rng = np.random.default_rng(11)
    for g in (surface_d3.tdec, surface_d3.tdec_dual):
        internal = np.flatnonzero(g.internal)
        for _ in range(250):
            marked = g.empty_vertex_set()
            for i in internal:
                if rng.random() < 0.5:
                    marked[i] = True
            req = MatchRequest(g, marked)
            fast = min_match(req)
            ref = brute_force_min_match(req)
            assert np.array_equal(boundary(g, fast), marked)
            assert fast.sum() == ref.sum()


def test_minimality_certificate(surface_d3):
    # for any E, every decomposition part R of E ^ MinMatch(dE) keeps at least
    # half of its edges outside the matching
    from clusterbus.graphs import cycle_decompose

    g = surface_d3.tdec_dual
    rng = np.random.default_rng(5)
    for _ in range(100):
        es = rng.random(g.n_edges) < 0.4
        m = min_match(MatchRequest(g, boundary(g, es)))
        for part in cycle_decompose(g, es ^ m):
            assert (part & ~m).sum() >= part.sum() / 2


def test_marked_must_be_internal(surface_d3):
    g = surface_d3.tdec
    marked = g.empty_vertex_set()
    marked[np.flatnonzero(~g.internal)[0]] = True
    with pytest.raises(MatchingError):
        MatchRequest(g, marked)
    with pytest.raises(MatchingError):
        MatchRequest(g, np.zeros(3, dtype=bool))


def test_brute_force_cap(cluster_d3r3):
    g = cluster_d3r3.tcl_dec
    assert g.n_edges > 24
    with pytest.raises(TooLarge):
        brute_force_min_match(MatchRequest(g, g.empty_vertex_set()))
