# resilience.py
# Exact evaluation of the resilience function on small graphs by exhaustive
# enumeration of simple closed loops and external-to-external paths, the
# closed-form bounds, and a Monte Carlo check of the matched-parity mismatch
# probability they dominate.
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional

import numpy as np

from .graphs import BoundaryGraph, EdgeSet, boundary, pairing
from .matching import MatchRequest, min_match

EXHAUSTIVE_EDGE_BUDGET = 60


class ResilienceError(ValueError):
    pass


class BudgetExceeded(ResilienceError):
    pass


class OutOfValidity(ResilienceError):
    pass


@dataclass
class PathCensus:
    """Per-length counts of simple loops / external paths with odd overlap
    against a recovery set."""

    counts: Dict[int, int] = field(default_factory=dict)
    loop_counts: Dict[int, int] = field(default_factory=dict)
    path_counts: Dict[int, int] = field(default_factory=dict)
    max_len: int = 0
    exhaustive: bool = True

    def n(self, length: int) -> int:
        return self.counts.get(length, 0)


def iter_simple_loops(g: BoundaryGraph, max_len: Optional[int] = None) -> Iterator[List[int]]:
    """Every simple closed loop exactly once: rooted at its minimum edge
    index, walked from that edge's lower endpoint."""
    cap = max_len if max_len is not None else g.n_edges
    for root in range(g.n_edges):
        a, b = g.edges[root]
        # simple paths b -> a using edges with index > root
        stack = [(b, [root], {a, b})]
        while stack:
            v, path, seen = stack.pop()
            for (i, w) in g.adjacency[v]:
                if i <= root:
                    continue
                if w == a and len(path) >= 2:
                    if len(path) + 1 <= cap:
                        yield path + [i]
                    continue
                if w in seen:
                    continue
                if len(path) + 1 < cap:
                    stack.append((w, path + [i], seen | {w}))


def iter_external_paths(g: BoundaryGraph, max_len: Optional[int] = None) -> Iterator[List[int]]:
    """Every simple path between two distinct external vertices through
    internal vertices, exactly once (start index < end index)."""
    cap = max_len if max_len is not None else g.n_edges
    externals = [v for v in range(g.n_verts) if not g.internal[v]]
    for s in externals:
        stack = [(s, [], {s})]
        while stack:
            v, path, seen = stack.pop()
            for (i, w) in g.adjacency[v]:
                if w in seen:
                    continue
                if not g.internal[w]:
                    if w > s and len(path) + 1 <= cap:
                        yield path + [i]
                    continue
                if len(path) + 1 < cap:
                    stack.append((w, path + [i], seen | {w}))


def enumerate_census(
    g: BoundaryGraph, recovery: EdgeSet, cap: Optional[int] = None
) -> PathCensus:
    """Count elements of the loop/external-path family with odd overlap
    against `recovery`, by length.  Without a cap the graph must be small
    enough for exhaustive enumeration."""
    if recovery.shape != (g.n_edges,):
        raise ResilienceError("recovery set sized for a different graph")
    if cap is None and g.n_edges > EXHAUSTIVE_EDGE_BUDGET:
        raise BudgetExceeded(
            f"{g.name}: {g.n_edges} edges needs an explicit length cap"
        )
    census = PathCensus(exhaustive=cap is None)
    rec_idx = set(np.flatnonzero(recovery).tolist())
    for kind, it in (("loop", iter_simple_loops(g, cap)), ("path", iter_external_paths(g, cap))):
        for edges in it:
            census.max_len = max(census.max_len, len(edges))
            if len(set(edges) & rec_idx) & 1:
                census.counts[len(edges)] = census.counts.get(len(edges), 0) + 1
                target = census.loop_counts if kind == "loop" else census.path_counts
                target[len(edges)] = target.get(len(edges), 0) + 1
    return census


def census_csv(census: PathCensus) -> str:
    """Dump the odd-overlap counts as 'length,count' CSV rows."""
    lines = ["length,count"]
    lines += [f"{length},{census.counts[length]}" for length in sorted(census.counts)]
    return "\n".join(lines) + "\n"


def res_value(census: PathCensus, p: float) -> float:
    """sum_l C(l, ceil(l/2)) N(l) p^ceil(l/2), ascending in l."""
    if not 0.0 <= p <= 1.0:
        raise ResilienceError(f"p = {p} outside [0, 1]")
    total = 0.0
    for length in sorted(census.counts):
        half = (length + 1) // 2
        total += math.comb(length, half) * census.counts[length] * p**half
    return total


# ---------------------------------------------------------------------------
# closed-form bounds
# ---------------------------------------------------------------------------

SURFACE_VALIDITY = 1.0 / 144.0
CLUSTER_VALIDITY = 1.0 / 400.0
ACHIEVABILITY_VALIDITY = 1.0 / 5006.0


def closed_form_bound(name: str, p: float, d: int | None = None, r: int | None = None) -> float:
    """The analytic bound values, each rejecting p outside its validity
    range:

      surface-res-X      54 p                    (p <= 1/144)
      surface-res-Z      38 p                    (p <= 1/144)
      surface-failure    94 p                    (p <= 1/144)
      cluster-res-X      (2402 + 100 d (R-1) (10 sqrt p)^(d-2)) p   (p <= 1/400)
      cluster-res-Z      (2400 + 100 d (R+1) (10 sqrt p)^(d-2)) p   (p <= 1/400)
      cluster-failure    (4806 + 200 d R (10 sqrt p)^(d-2)) p       (p <= 1/400)
      cluster-success    1 - 5006 p              (p <= 1/5006, R within max-R)
      max-R              (1/d) (1/(10 sqrt p))^(d-2)
    """
    if p < 0:
        raise OutOfValidity("p must be nonnegative")
    if name in ("surface-res-X", "surface-res-Z", "surface-failure"):
        if p > SURFACE_VALIDITY:
            raise OutOfValidity(f"{name} requires p <= 1/144")
        return {"surface-res-X": 54.0, "surface-res-Z": 38.0, "surface-failure": 94.0}[name] * p
    if name in ("cluster-res-X", "cluster-res-Z", "cluster-failure"):
        if p > CLUSTER_VALIDITY:
            raise OutOfValidity(f"{name} requires p <= 1/400")
        if d is None or r is None:
            raise ResilienceError(f"{name} needs d and R")
        tail = (10.0 * math.sqrt(p)) ** (d - 2)
        if name == "cluster-res-X":
            return (2402.0 + 100.0 * d * (r - 1) * tail) * p
        if name == "cluster-res-Z":
            return (2400.0 + 100.0 * d * (r + 1) * tail) * p
        return (4806.0 + 200.0 * d * r * tail) * p
    if name == "cluster-success":
        if p > ACHIEVABILITY_VALIDITY:
            raise OutOfValidity("cluster-success requires p <= 1/5006")
        return 1.0 - 5006.0 * p
    if name == "max-R":
        if d is None:
            raise ResilienceError("max-R needs d")
        if p <= 0:
            raise OutOfValidity("max-R requires p > 0")
        return (1.0 / d) * (1.0 / (10.0 * math.sqrt(p))) ** (d - 2)
    raise ResilienceError(f"unknown bound {name!r}")


# ---------------------------------------------------------------------------
# Monte Carlo mismatch probability
# ---------------------------------------------------------------------------


@dataclass
class MismatchEstimate:
    hits: int
    trials: int

    @property
    def p_hat(self) -> float:
        return self.hits / self.trials

    def sigma(self) -> float:
        ph = self.p_hat
        return math.sqrt(max(ph * (1.0 - ph), 1.0 / self.trials) / self.trials)


def mismatch_probability_mc(
    g: BoundaryGraph, recovery: EdgeSet, q: float, trials: int, seed: int
) -> MismatchEstimate:
    """Estimate Pr[<E ^ MinMatch(dE), L> = 1] for E an i.i.d.-q random edge
    subset; the resilience value upper-bounds this for any local stochastic
    subset of strength q."""
    if not 0.0 <= q <= 1.0:
        raise ResilienceError(f"q = {q} outside [0, 1]")
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x6D69736D)))
    hits = 0
    for _ in range(trials):
        es = rng.random(g.n_edges) < q
        m = min_match(MatchRequest(g, boundary(g, es)))
        hits += pairing(es ^ m, recovery)
    return MismatchEstimate(hits, trials)
