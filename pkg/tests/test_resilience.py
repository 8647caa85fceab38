import math

import numpy as np
import pytest

from clusterbus.geometry import LatticeParams
from clusterbus.graphs import BoundaryGraph, boundary, build_surface_decoding
from clusterbus.resilience import (
    BudgetExceeded,
    OutOfValidity,
    closed_form_bound,
    enumerate_census,
    iter_external_paths,
    iter_simple_loops,
    mismatch_probability_mc,
    res_value,
)


def test_census_primal_leading_term(surface_d3):
    g = surface_d3.tdec
    census = enumerate_census(g, g.recovery["L_X"])
    assert census.n(1) == 1  # the single length-1 crossing path
    assert census.exhaustive


def test_census_dual_leading_terms(surface_d3):
    g = surface_d3.tdec_dual
    census = enumerate_census(g, g.recovery["L_Z*"])
    assert census.n(1) == 0
    assert census.n(2) >= 1


def test_census_empty_recovery(surface_d3):
    g = surface_d3.tdec
    census = enumerate_census(g, g.empty_edge_set())
    assert not census.counts


def test_enumerated_objects_have_empty_boundary(surface_d3):
    for g in (surface_d3.tdec, surface_d3.tdec_dual):
        for edges in iter_simple_loops(g):
            es = g.empty_edge_set()
            es[edges] = True
            assert not boundary(g, es).any()
        for edges in iter_external_paths(g):
            es = g.empty_edge_set()
            es[edges] = True
            assert not boundary(g, es).any()


def test_path_counts_respect_degree_bound():
    # in the 2D decoding graphs (max degree 4) the number of simple external
    # paths of length l is at most (#external starts) * 3^(l-1)
    for d in (3, 4):
        for g in build_surface_decoding(LatticeParams(d)):
            n_ext = int((~g.internal).sum())
            by_len = {}
            for edges in iter_external_paths(g):
                by_len[len(edges)] = by_len.get(len(edges), 0) + 1
            for length, count in by_len.items():
                assert count <= n_ext * 3 ** (length - 1)


def test_path_counts_degree_bound_3d(cluster_d2r3):
    # the 3D decoding graphs have max degree 6: at most 5^l paths per start
    for g in (cluster_d2r3.tcl_dec, cluster_d2r3.tcl_dec_dual):
        n_ext = int((~g.internal).sum())
        by_len = {}
        for edges in iter_external_paths(g):
            by_len[len(edges)] = by_len.get(len(edges), 0) + 1
        for length, count in by_len.items():
            assert count <= n_ext * 5**length


def test_census_csv_dump(surface_d3):
    from clusterbus.resilience import census_csv

    g = surface_d3.tdec
    census = enumerate_census(g, g.recovery["L_X"])
    lines = census_csv(census).strip().splitlines()
    assert lines[0] == "length,count"
    assert lines[1] == "1,1"


def test_census_isomorphism_invariant(surface_d3):
    g = surface_d3.tdec_dual
    perm = np.random.default_rng(4).permutation(g.n_verts)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(g.n_verts)
    # relabel vertices but keep sites attached to the same structure
    verts = tuple(g.verts[int(inv[i])] for i in range(g.n_verts))
    internal = np.array([g.internal[int(inv[i])] for i in range(g.n_verts)])
    edges = tuple(
        (min(int(perm[a]), int(perm[b])), max(int(perm[a]), int(perm[b])))
        for a, b in g.edges
    )
    g2 = BoundaryGraph("perm", verts, internal, edges, g.labels)
    c1 = enumerate_census(g, g.recovery["L_Z*"])
    c2 = enumerate_census(g2, g2.edge_set_from_labels(
        [g.labels[i] for i in np.flatnonzero(g.recovery["L_Z*"])]
    ))
    assert c1.counts == c2.counts


def test_res_value_examples(surface_d3):
    g = surface_d3.tdec
    census = enumerate_census(g, g.recovery["L_X"])
    assert res_value(census, 0.0) == 0.0
    # the length-1 term is exactly N(1) * p; lengths 1 and 2 both enter at
    # order p, everything longer at order p^2
    p = 1e-9
    order_p = census.n(1) + 2 * census.n(2)
    assert res_value(census, p) == pytest.approx(order_p * p, rel=1e-6)
    assert census.n(1) * math.comb(1, 1) * p == p


def test_res_value_monotone(surface_d3):
    g = surface_d3.tdec_dual
    census = enumerate_census(g, g.recovery["L_Z*"])
    grid = [0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0]
    vals = [res_value(census, p) for p in grid]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("d", [3, 4])
def test_res_bounds_hold(d):
    tdec, tdec_dual = build_surface_decoding(LatticeParams(d))
    p = 1.0 / 144.0
    rx = res_value(enumerate_census(tdec, tdec.recovery["L_X"]), p)
    rz = res_value(enumerate_census(tdec_dual, tdec_dual.recovery["L_Z*"]), p)
    assert rx <= closed_form_bound("surface-res-X", p) * (1 + 1e-12)
    assert rz <= closed_form_bound("surface-res-Z", p) * (1 + 1e-12)


def test_budget_guard():
    from clusterbus.graphs import build_cluster_decoding

    g, _ = build_cluster_decoding(LatticeParams(4, 5))
    assert g.n_edges > 60
    with pytest.raises(BudgetExceeded):
        enumerate_census(g, g.empty_edge_set())
    capped = enumerate_census(g, g.recovery["L_cl,X"], cap=2)
    assert not capped.exhaustive
    assert capped.max_len <= 2


def test_closed_form_values():
    assert closed_form_bound("surface-failure", 1 / 144) == pytest.approx(94 / 144)
    assert closed_form_bound("max-R", 1e-4, d=5) == pytest.approx(200.0, abs=1e-12)
    # leading coefficient of the cluster bounds as p -> 0
    tiny = 1e-14
    assert closed_form_bound("cluster-res-X", tiny, d=4, r=9) / tiny == pytest.approx(
        2402.0, rel=1e-5
    )
    assert closed_form_bound("cluster-res-Z", tiny, d=4, r=9) / tiny == pytest.approx(
        2400.0, rel=1e-5
    )
    with pytest.raises(OutOfValidity):
        closed_form_bound("surface-failure", 0.5)
    with pytest.raises(OutOfValidity):
        closed_form_bound("cluster-failure", 0.02, d=3, r=3)
    with pytest.raises(OutOfValidity):
        closed_form_bound("cluster-success", 1e-3)


def test_mismatch_mc_zero_rate(surface_d3):
    g = surface_d3.tdec
    est = mismatch_probability_mc(g, g.recovery["L_X"], 0.0, 100, 0)
    assert est.hits == 0


def test_proposition_inequality(surface_d3):
    for g, key in ((surface_d3.tdec, "L_X"), (surface_d3.tdec_dual, "L_Z*")):
        census = enumerate_census(g, g.recovery[key])
        for q in (1 / 400, 1 / 200):
            est = mismatch_probability_mc(g, g.recovery[key], q, 5000, 3)
            assert est.p_hat <= res_value(census, q) + 3 * est.sigma()
