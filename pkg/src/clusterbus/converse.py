# converse.py
# The cluster-converse experiment (straight paths, appropriate sets, the
# exact appropriateness formula and its half-identity, and the B_Z estimate
# through the real decoder) plus the closed-form low-latency converse
# calculators.
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .geometry import LatticeParams
from .graphs import EdgeSet, pairing
from .noise import PauliError, derive_gl
from .protocols import ClusterContext, build_cluster_context, wilson_interval
from .resilience import OutOfValidity


class ConverseError(ValueError):
    pass


@dataclass(frozen=True)
class ConverseParams:
    """Even distance d, odd bus length R, and the bit-flip rate p <= 1/4 of
    the converse theorem.  The sampled per-edge marginal is 2p (the rate the
    exact appropriateness formula counts with)."""

    d: int
    r: int
    p: float

    def __post_init__(self):
        if self.d < 2 or self.d % 2:
            raise ConverseError(f"converse needs even d >= 2, got {self.d}")
        if self.r < 3 or self.r % 2 == 0:
            raise ConverseError(f"R must be odd >= 3, got {self.r}")
        if not 0.0 < self.p <= 0.25:
            raise ConverseError(f"p must lie in (0, 1/4], got {self.p}")

    @property
    def edge_rate(self) -> float:
        return 2.0 * self.p

    def in_theorem_regime(self) -> bool:
        return self.r >= (1.0 / (2.0 * math.sqrt(self.p))) ** self.d


def straight_paths(ctx: ClusterContext) -> List[EdgeSet]:
    """The pairwise-disjoint horizontal length-d paths P_{j,k} from the left
    external vertex (0, 2j, 2k) to the right external vertex (2d, 2j, 2k),
    0 <= j <= d-1, 1 <= k <= (R-1)/2.  Each crosses the recovery set in
    exactly one edge."""
    d, r = ctx.params.d, ctx.params.r
    g = ctx.tcl_dec
    out = []
    for j in range(d):
        for k in range(1, (r - 1) // 2 + 1):
            es = g.empty_edge_set()
            for i in range(d):
                a = g.vert_index[(2 * i, 2 * j, 2 * k)]
                b = g.vert_index[(2 * i + 2, 2 * j, 2 * k)]
                es[g.pair_to_edge[(min(a, b), max(a, b))]] = True
            out.append(es)
    return out


def pr_appropriate_exact(params: ConverseParams) -> float:
    """1 - (1 - C(d, d/2) (2p)^{d/2} (1-2p)^{d/2})^{d (R-1)/2}: the chance
    that some straight path carries exactly d/2 marked edges."""
    d, r, p = params.d, params.r, params.p
    per_path = math.comb(d, d // 2) * (2.0 * p) ** (d // 2) * (1.0 - 2.0 * p) ** (d // 2)
    n_paths = d * (r - 1) // 2
    return 1.0 - (1.0 - per_path) ** n_paths


@dataclass
class ConverseStats:
    params: ConverseParams
    trials: int
    seed: int
    n_appr: int
    n_bz1: int
    n_e1_and_appr: int

    @property
    def pr_appr(self) -> float:
        return self.n_appr / self.trials

    @property
    def pr_bz1(self) -> float:
        return self.n_bz1 / self.trials

    @property
    def pr_e1_and_appr(self) -> float:
        return self.n_e1_and_appr / self.trials

    def intervals(self):
        return {
            "pr_appr": wilson_interval(self.n_appr, self.trials),
            "pr_bz1": wilson_interval(self.n_bz1, self.trials),
            "pr_e1_and_appr": wilson_interval(self.n_e1_and_appr, self.trials),
        }


def converse_mc(
    params: ConverseParams,
    trials: int,
    seed: int,
    ctx: ClusterContext | None = None,
) -> ConverseStats:
    """Sample bit-flip edge sets Y on T_cl,dec at the 2p edge marginal,
    classify appropriateness (|Y & P_{j,k}| = d/2 for some straight path),
    and compute B_Z through the full protocol pipeline (derive, boundary,
    minimum matching, recovery pairing)."""
    if ctx is None:
        ctx = build_cluster_context(LatticeParams(params.d, params.r))
    g = ctx.tcl_dec
    paths = straight_paths(ctx)
    path_idx = [np.flatnonzero(p) for p in paths]
    half = params.d // 2
    labels = list(g.labels)

    from .graphs import boundary
    from .matching import MatchRequest, min_match

    n_appr = n_bz1 = n_both = 0
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence((seed, t)))
        y = rng.random(g.n_edges) < params.edge_rate
        appr = any(int(y[idx].sum()) == half for idx in path_idx)
        # bit-flip Pauli error on the sampled labels -> the glued error is
        # exactly Y restricted to the Z-measured bulk edges
        E = PauliError(frozenset(labels[i] for i in np.flatnonzero(y)), frozenset())
        assert not E.zsupp  # A_Z = 0 identically under bit-flip noise
        egl, _ = derive_gl(E, ctx)
        m = min_match(MatchRequest(g, boundary(g, egl)))
        bz = pairing(egl ^ m, g.recovery["L_cl,X"])
        n_appr += appr
        n_bz1 += bz
        n_both += appr and bz
    return ConverseStats(params, trials, seed, n_appr, n_bz1, n_both)


# ---------------------------------------------------------------------------
# low-latency converse calculators
# ---------------------------------------------------------------------------


def latency_fail_lower_bound(r: int, p: float, delta_m: int) -> float:
    """p_fail >= 1 - exp(-R (4 p^2 / 3)^{Delta m}) for any depth-Delta scheme
    with m qubits per repeater."""
    if not 0.0 < p < 1.0:
        raise OutOfValidity(f"p must lie in (0, 1), got {p}")
    if delta_m < 1 or r < 0:
        raise ConverseError("need Delta*m >= 1 and R >= 0")
    return 1.0 - math.exp(-r * (4.0 * p * p / 3.0) ** delta_m)


def latency_max_range(p0: float, delta_m: int) -> float:
    """R <= (3 / (4 p0^2))^{Delta m} for schemes resilient up to strength p0."""
    if not 0.0 < p0 < 1.0:
        raise OutOfValidity(f"p0 must lie in (0, 1), got {p0}")
    if delta_m < 1:
        raise ConverseError("need Delta*m >= 1")
    return (3.0 / (4.0 * p0 * p0)) ** delta_m
