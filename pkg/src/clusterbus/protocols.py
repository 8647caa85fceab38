# protocols.py
# The two protocol engines.  The fast path evaluates the exact combinatorial
# success conditions (the outcome is a deterministic function of the Pauli
# error; measurement randomness cancels).  The literal step-by-step decoding
# pipeline from raw measurement outcomes is kept for oracle cross-validation.
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Tuple

import numpy as np

from .geometry import (
    LatticeParams,
    MeasurementPartition,
    Site,
    cluster_qubits,
    measurement_partition,
    surface_qubits,
)
from .graphs import (
    BoundaryGraph,
    boundary,
    build_cluster_decoding,
    build_surface,
    build_surface_decoding,
    pairing,
)
from .matching import MatchRequest, min_match
from .noise import NoiseModel, PauliError, derive_gl, derive_surface_supports, sample_error, trial_rng

Z95 = 1.959963984540054


@dataclass(frozen=True)
class Outcome:
    """Bell label (alpha, beta): the run leaves the distinguished qubits in
    the Bell state Phi_(alpha,beta); success means (0, 0)."""

    alpha: int
    beta: int

    def index(self) -> int:
        return 2 * self.alpha + self.beta


@dataclass
class SurfaceContext:
    params: LatticeParams
    partition: MeasurementPartition
    tsc: BoundaryGraph
    tsc_dual: BoundaryGraph
    tdec: BoundaryGraph
    tdec_dual: BoundaryGraph
    qubits: Tuple[Site, ...]
    qubit_set: FrozenSet[Site] = field(init=False)

    def __post_init__(self):
        self.qubit_set = frozenset(self.qubits)


@dataclass
class ClusterContext:
    params: LatticeParams
    partition: MeasurementPartition
    tcl_dec: BoundaryGraph
    tcl_dec_dual: BoundaryGraph
    qubits: Tuple[Site, ...]
    qubit_set: FrozenSet[Site] = field(init=False)

    def __post_init__(self):
        self.qubit_set = frozenset(self.qubits)


def build_surface_context(params: LatticeParams) -> SurfaceContext:
    tsc, tsc_dual = build_surface(params)
    tdec, tdec_dual = build_surface_decoding(params)
    part = measurement_partition("surface", params)
    qubits = tuple(sorted(surface_qubits(params), key=lambda s: (s[2], s[1], s[0])))
    return SurfaceContext(params, part, tsc, tsc_dual, tdec, tdec_dual, qubits)


def build_cluster_context(params: LatticeParams) -> ClusterContext:
    tcl_dec, tcl_dec_dual = build_cluster_decoding(params)
    part = measurement_partition("cluster", params)
    qubits = tuple(sorted(cluster_qubits(params), key=lambda s: (s[2], s[1], s[0])))
    return ClusterContext(params, part, tcl_dec, tcl_dec_dual, qubits)


def _matched_difference_parity(g: BoundaryGraph, es: np.ndarray, recovery_key: str) -> int:
    m = min_match(MatchRequest(g, boundary(g, es)))
    return pairing(es ^ m, g.recovery[recovery_key])


def surface_outcome(E: PauliError, ctx: SurfaceContext) -> Outcome:
    """alpha = <{q}, supp(E^Z)> xor <supp(E^Z) ^ MinMatch(d supp(E^Z)), L_X>,
    beta analogously on the dual graph with E^X and L_Z*."""
    ez, ex = derive_surface_supports(E, ctx)
    q = ctx.partition.distinguished[0]
    alpha = (q in E.zsupp) ^ _matched_difference_parity(ctx.tdec, ez, "L_X")
    beta = (q in E.xsupp) ^ _matched_difference_parity(ctx.tdec_dual, ex, "L_Z*")
    return Outcome(int(alpha), int(beta))


def cluster_outcome(E: PauliError, ctx: ClusterContext) -> Outcome:
    egl, egl_dual = derive_gl(E, ctx)
    q1, q2 = ctx.partition.distinguished
    a_z = (q1 in E.zsupp) ^ (q2 in E.zsupp)
    a_x = (q1 in E.xsupp) ^ (q2 in E.xsupp)
    alpha = a_z ^ _matched_difference_parity(ctx.tcl_dec, egl, "L_cl,X")
    beta = a_x ^ _matched_difference_parity(ctx.tcl_dec_dual, egl_dual, "L_cl,Z*")
    return Outcome(int(alpha), int(beta))


def decode_from_outcomes(kind: str, outcomes: Dict[Site, int], ctx) -> Tuple[int, int]:
    """The classical halves of the protocols: map raw measurement outcome bits
    (one per measured qubit) to the correction bits (c_X, c_Z) applied to the
    distinguished qubit."""
    if kind == "surface":
        part = ctx.partition
        _expect_keys(outcomes, part.set_x | part.set_z)
        x = ctx.tdec.edge_set_from_labels(
            [s for s in part.set_x if outcomes[s]]
        )
        z = ctx.tdec_dual.edge_set_from_labels(
            [s for s in part.set_z if outcomes[s]]
        )
        m = min_match(MatchRequest(ctx.tdec, boundary(ctx.tdec, x)))
        m_dual = min_match(MatchRequest(ctx.tdec_dual, boundary(ctx.tdec_dual, z)))
        s_x = pairing(m, ctx.tdec.recovery["L_X"])
        s_z = pairing(m_dual, ctx.tdec_dual.recovery["L_Z*"])
        c_x = pairing(x, ctx.tdec.recovery["L_X"]) ^ s_x
        c_z = pairing(z, ctx.tdec_dual.recovery["L_Z*"]) ^ s_z
        return c_x, c_z
    if kind == "cluster":
        part = ctx.partition
        _expect_keys(outcomes, part.set_a | part.set_x | part.set_z)
        g, gd = ctx.tcl_dec, ctx.tcl_dec_dual
        primal = g.edge_set_from_labels(
            [lab for lab in g.labels if lab in part.set_a and outcomes[lab]]
            + [s for s in part.set_x if outcomes[s]]
        )
        dual = gd.edge_set_from_labels(
            [lab for lab in gd.labels if lab in part.set_a and outcomes[lab]]
            + [s for s in part.set_z if outcomes[s]]
        )
        m = min_match(MatchRequest(g, boundary(g, primal)))
        m_dual = min_match(MatchRequest(gd, boundary(gd, dual)))
        s_x = pairing(m, g.recovery["L_cl,X"])
        s_z = pairing(m_dual, gd.recovery["L_cl,Z*"])
        a_on_l = sum(
            outcomes[g.labels[i]] for i in np.flatnonzero(g.recovery["L_cl,X&A"])
        )
        x_on_l = sum(
            outcomes[g.labels[i]] for i in np.flatnonzero(g.recovery["L_cl,X&B"])
        )
        c_x = (a_on_l & 1) ^ (x_on_l & 1) ^ s_x
        a_on_ld = sum(
            outcomes[gd.labels[i]] for i in np.flatnonzero(gd.recovery["L_cl,Z*&A"])
        )
        z_on_ld = sum(
            outcomes[gd.labels[i]] for i in np.flatnonzero(gd.recovery["L_cl,Z*&B"])
        )
        c_z = (a_on_ld & 1) ^ (z_on_ld & 1) ^ s_z
        return c_x, c_z
    raise ValueError(f"unknown protocol kind {kind!r}")


def _expect_keys(outcomes: Dict[Site, int], expected: FrozenSet[Site]):
    if set(outcomes) != expected:
        raise ValueError(
            f"outcome vector has {len(outcomes)} entries, expected {len(expected)}"
        )


def wilson_interval(k: int, n: int, z: float = Z95) -> Tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class TrialStats:
    kind: str
    params: LatticeParams
    model: NoiseModel
    trials: int
    seed: int
    counts: Tuple[int, int, int, int]  # indexed by 2*alpha + beta

    def __post_init__(self):
        if sum(self.counts) != self.trials:
            raise ValueError("tallies do not sum to the trial count")

    @property
    def nu00_hat(self) -> float:
        return self.counts[0] / self.trials

    def nu00_interval(self) -> Tuple[float, float]:
        return wilson_interval(self.counts[0], self.trials)


def _run_range(kind, ctx, model, seed, lo, hi) -> np.ndarray:
    counts = np.zeros(4, dtype=np.int64)
    outcome_fn = surface_outcome if kind == "surface" else cluster_outcome
    for t in range(lo, hi):
        E = sample_error(model, ctx.qubits, trial_rng(seed, t))
        if not E.xsupp and not E.zsupp:
            counts[0] += 1
            continue
        counts[outcome_fn(E, ctx).index()] += 1
    return counts


def run_trials(
    kind: str,
    params: LatticeParams,
    model: NoiseModel,
    trials: int,
    seed: int,
    threads: int = 1,
    ctx=None,
) -> TrialStats:
    """Monte Carlo runner: per-trial streams keyed by (seed, trial index), so
    tallies are bitwise identical for any thread count."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if ctx is None:
        ctx = (
            build_surface_context(params)
            if kind == "surface"
            else build_cluster_context(params)
        )
    if threads <= 1:
        counts = _run_range(kind, ctx, model, seed, 0, trials)
    else:
        chunk = max(1, math.ceil(trials / (4 * threads)))
        ranges = [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(_run_range, kind, ctx, model, seed, lo, hi)
                for lo, hi in ranges
            ]
            counts = sum(f.result() for f in futs)
    return TrialStats(kind, params, model, trials, seed, tuple(int(c) for c in counts))
