# oracle.py
# Exact stabilizer-tableau simulation of small instances, used to validate
# the combinatorial protocol engines, plus symbolic verification of the
# cluster-state stabilizer-product identities.
#
# Pauli bookkeeping uses the XZ-ordered convention: an operator is
# i^phase * X(xset) * Z(zset), so products only ever pick up factors
# (-1)^{|z1 & x2|}.  A standard-form Pauli string (+/- with Y written as a
# single letter) has sign i^(phase - |xset & zset|).
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from .geometry import (
    LatticeParams,
    Site,
    cluster_q1_q2,
    cluster_qubits,
    measurement_partition,
    neigh,
    surface_qubits,
)
from .graphs import BoundaryGraph, build_cluster_decoding
from .noise import PauliError
from .protocols import (
    ClusterContext,
    Outcome,
    SurfaceContext,
    decode_from_outcomes,
)

TABLEAU_QUBIT_CAP = 64
REF_SITE: Site = (-1, -1, -1)  # reference qubit of the half-encoded Bell state


class OracleError(ValueError):
    pass


class TooLargeState(OracleError):
    pass


class NotBell(OracleError):
    pass


# ---------------------------------------------------------------------------
# symbolic Pauli strings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PauliOp:
    """i^phase * X(xset) * Z(zset)."""

    xset: FrozenSet[Site]
    zset: FrozenSet[Site]
    phase: int = 0

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        flip = len(self.zset & other.xset) & 1
        return PauliOp(
            self.xset ^ other.xset,
            self.zset ^ other.zset,
            (self.phase + other.phase + 2 * flip) % 4,
        )

    def sign_bit(self) -> int:
        """0 for +, 1 for -; raises if the operator is not +/- a standard
        Pauli string."""
        rem = (self.phase - len(self.xset & self.zset)) % 4
        if rem % 2:
            raise OracleError("operator has an imaginary scalar")
        return rem // 2

    @staticmethod
    def identity() -> "PauliOp":
        return PauliOp(frozenset(), frozenset(), 0)


def graph_state_generator(u: Site, qubits: FrozenSet[Site]) -> PauliOp:
    """G_u = Z_u prod_{v in neigh(u)} X_v."""
    return PauliOp(neigh(u, qubits), frozenset((u,)))


def product(ops: Iterable[PauliOp]) -> PauliOp:
    acc = PauliOp.identity()
    for op in ops:
        acc = acc * op
    return acc


# ---------------------------------------------------------------------------
# stabilizer tableau
# ---------------------------------------------------------------------------


class Tableau:
    """n commuting independent generators over n qubits, each stored as
    (x row, z row, phase mod 4) in the XZ-ordered convention."""

    def __init__(self, sites: Sequence[Site], generators: Sequence[PauliOp]):
        n = len(sites)
        if n > TABLEAU_QUBIT_CAP:
            raise TooLargeState(f"{n} qubits exceeds the {TABLEAU_QUBIT_CAP}-qubit tableau cap")
        if len(generators) != n:
            raise OracleError("need exactly one generator per qubit")
        self.sites = tuple(sites)
        self.site_index = {s: i for i, s in enumerate(self.sites)}
        self.n = n
        self.x = np.zeros((n, n), dtype=bool)
        self.z = np.zeros((n, n), dtype=bool)
        self.phase = np.zeros(n, dtype=np.int64)
        for i, gop in enumerate(generators):
            for s in gop.xset:
                self.x[i, self.site_index[s]] = True
            for s in gop.zset:
                self.z[i, self.site_index[s]] = True
            self.phase[i] = gop.phase % 4
        self._validate()

    def _validate(self):
        # every generator must be +/- a Hermitian Pauli string
        y_counts = (self.x & self.z).sum(axis=1)
        if np.any((self.phase - y_counts) % 2):
            raise OracleError("generator with imaginary scalar")
        # pairwise commutation
        sym = (self.x.astype(np.uint8) @ self.z.T.astype(np.uint8)) % 2
        if np.any((sym + sym.T) % 2):
            raise OracleError("generators do not pairwise commute")
        # independence: full rank of (x | z) over GF(2)
        if _gf2_rank(np.concatenate([self.x, self.z], axis=1)) != self.n:
            raise OracleError("generators are not independent")

    # -- internals ----------------------------------------------------------

    def _mul_row(self, i: int, x2: np.ndarray, z2: np.ndarray, p2: int):
        self.phase[i] = (self.phase[i] + p2 + 2 * (np.count_nonzero(self.z[i] & x2) & 1)) % 4
        self.x[i] ^= x2
        self.z[i] ^= z2

    def _solve_member(self, xt: np.ndarray, zt: np.ndarray):
        """If i^p X(xt) Z(zt) is in the group for some p, return the sign bit
        of the standard Pauli; otherwise None."""
        packed = []
        for i in range(self.n):
            bits = 0
            for j in np.flatnonzero(self.x[i]):
                bits |= 1 << int(j)
            for j in np.flatnonzero(self.z[i]):
                bits |= 1 << int(self.n + j)
            packed.append([bits, 1 << i])
        # Gaussian elimination, tracking row combinations
        pivot_rows: List[List[int]] = []
        pivot_cols: List[int] = []
        for row in packed:
            cur = row[:]
            for pc, prow in zip(pivot_cols, pivot_rows):
                if cur[0] & (1 << pc):
                    cur[0] ^= prow[0]
                    cur[1] ^= prow[1]
            if cur[0]:
                pivot_cols.append(_lowest_bit(cur[0]))
                pivot_rows.append(cur)
        tbits = 0
        for s in np.flatnonzero(xt):
            tbits |= 1 << int(s)
        for s in np.flatnonzero(zt):
            tbits |= 1 << int(self.n + s)
        combo = 0
        cur = tbits
        for pc, prow in zip(pivot_cols, pivot_rows):
            if cur & (1 << pc):
                cur ^= prow[0]
                combo ^= prow[1]
        if cur:
            return None
        # multiply the selected generators in index order
        acc_x = np.zeros(self.n, dtype=bool)
        acc_z = np.zeros(self.n, dtype=bool)
        acc_p = 0
        for i in range(self.n):
            if combo & (1 << i):
                acc_p = (acc_p + self.phase[i] + 2 * (np.count_nonzero(acc_z & self.x[i]) & 1)) % 4
                acc_x ^= self.x[i]
                acc_z ^= self.z[i]
        if not (np.array_equal(acc_x, xt) and np.array_equal(acc_z, zt)):
            raise OracleError("solver produced a different operator")
        rem = (acc_p - int(np.count_nonzero(acc_x & acc_z))) % 4
        if rem % 2:
            raise OracleError("group member with imaginary scalar")
        return rem // 2

    # -- public operations ---------------------------------------------------

    def apply_pauli(self, E: PauliError):
        """Flip generator signs where the generator anticommutes with E."""
        ex = np.zeros(self.n, dtype=bool)
        ez = np.zeros(self.n, dtype=bool)
        for s in E.xsupp:
            ex[self.site_index[s]] = True
        for s in E.zsupp:
            ez[self.site_index[s]] = True
        anti = ((self.x & ez).sum(axis=1) + (self.z & ex).sum(axis=1)) % 2
        self.phase = (self.phase + 2 * anti) % 4

    def measure(self, site: Site, basis: str, rng: np.random.Generator) -> int:
        """Measure X or Z on one qubit; outcome bit 0 <-> eigenvalue +1."""
        j = self.site_index[site]
        if basis == "Z":
            anti = np.flatnonzero(self.x[:, j])
            mx = np.zeros(self.n, dtype=bool)
            mz = np.zeros(self.n, dtype=bool)
            mz[j] = True
        elif basis == "X":
            anti = np.flatnonzero(self.z[:, j])
            mx = np.zeros(self.n, dtype=bool)
            mz = np.zeros(self.n, dtype=bool)
            mx[j] = True
        else:
            raise OracleError(f"unsupported basis {basis!r}")
        if anti.size == 0:
            bit = self._solve_member(mx, mz)
            if bit is None:
                raise OracleError("commuting measurement with undetermined value")
            return bit
        pivot = int(anti[0])
        px, pz, pp = self.x[pivot].copy(), self.z[pivot].copy(), int(self.phase[pivot])
        for i in anti[1:]:
            self._mul_row(int(i), px, pz, pp)
        bit = int(rng.integers(2))
        self.x[pivot] = mx
        self.z[pivot] = mz
        self.phase[pivot] = 2 * bit
        return bit

    def stabilizer_sign(self, xsites: Iterable[Site], zsites: Iterable[Site]):
        xt = np.zeros(self.n, dtype=bool)
        zt = np.zeros(self.n, dtype=bool)
        for s in xsites:
            xt[self.site_index[s]] = True
        for s in zsites:
            zt[self.site_index[s]] = True
        return self._solve_member(xt, zt)


def _lowest_bit(v: int) -> int:
    return (v & -v).bit_length() - 1


def _gf2_rank(mat: np.ndarray) -> int:
    rows = [int.from_bytes(np.packbits(r).tobytes(), "big") for r in mat]
    rank = 0
    while rows:
        row = rows.pop()
        if row == 0:
            continue
        low = row & -row
        rank += 1
        rows = [r ^ row if r & low else r for r in rows]
    return rank


# ---------------------------------------------------------------------------
# state builders
# ---------------------------------------------------------------------------


def build_cluster_state(params: LatticeParams) -> Tableau:
    """Graph state on the cluster lattice, generators G_u = Z_u X(neigh(u))."""
    qs = cluster_qubits(params)
    sites = tuple(sorted(qs, key=lambda s: (s[2], s[1], s[0])))
    gens = [graph_state_generator(u, qs) for u in sites]
    return Tableau(sites, gens)


def build_half_encoded_bell(params: LatticeParams) -> Tableau:
    """Bell state between a surface-code logical qubit and a physical
    reference qubit: stabilizers {A_v} and {B_f} of the code plus
    S^X = X(L_X) X_q X_ref and S^Z = Z(L_Z*) Z_q Z_ref."""
    d = params.d
    qs = surface_qubits(params)
    sites = tuple(sorted(qs, key=lambda s: (s[2], s[1], s[0]))) + (REF_SITE,)
    gens: List[PauliOp] = []
    for u1 in range(2, 2 * d - 1, 2):
        for u2 in range(0, 2 * d - 1, 2):
            gens.append(PauliOp(neigh((u1, u2, 0), qs), frozenset()))
    for u1 in range(1, 2 * d, 2):
        for u2 in range(1, 2 * d - 2, 2):
            gens.append(PauliOp(frozenset(), neigh((u1, u2, 0), qs)))
    lx = frozenset((1, u2, 0) for u2 in range(2, 2 * d - 1, 2))
    lz = frozenset((u1, 0, 0) for u1 in range(3, 2 * d, 2))
    q = (1, 0, 0)
    gens.append(PauliOp(lx | {q, REF_SITE}, frozenset()))
    gens.append(PauliOp(frozenset(), lz | {q, REF_SITE}))
    return Tableau(sites, gens)


def extract_bell_label(t: Tableau, qa: Site, qb: Site) -> Outcome:
    """Read the signs of X_a X_b and Z_a Z_b; requires every other qubit to
    have been measured out so the residual pair is a Bell basis state."""
    alpha = t.stabilizer_sign((qa, qb), ())
    beta = t.stabilizer_sign((), (qa, qb))
    if alpha is None or beta is None:
        raise NotBell("residual two-qubit state is not a Bell basis state")
    return Outcome(alpha, beta)


# ---------------------------------------------------------------------------
# end-to-end protocol simulation
# ---------------------------------------------------------------------------


@dataclass
class OracleRun:
    outcomes: Dict[Site, int]
    correction: Tuple[int, int]
    label: Outcome


def run_surface_oracle(E: PauliError, ctx: SurfaceContext, rng: np.random.Generator) -> OracleRun:
    t = build_half_encoded_bell(ctx.params)
    t.apply_pauli(E)
    part = ctx.partition
    outcomes: Dict[Site, int] = {}
    for s in sorted(part.set_x | part.set_z, key=lambda s: (s[2], s[1], s[0])):
        basis = "X" if s in part.set_x else "Z"
        outcomes[s] = t.measure(s, basis, rng)
    c_x, c_z = decode_from_outcomes("surface", outcomes, ctx)
    q = part.distinguished[0]
    t.apply_pauli(
        PauliError(frozenset((q,)) if c_z else frozenset(), frozenset((q,)) if c_x else frozenset())
    )
    return OracleRun(outcomes, (c_x, c_z), extract_bell_label(t, q, REF_SITE))


def run_cluster_oracle(E: PauliError, ctx: ClusterContext, rng: np.random.Generator) -> OracleRun:
    t = build_cluster_state(ctx.params)
    t.apply_pauli(E)
    part = ctx.partition
    outcomes: Dict[Site, int] = {}
    for s in sorted(part.set_a | part.set_x | part.set_z, key=lambda s: (s[2], s[1], s[0])):
        basis = "X" if s in part.set_x else "Z"
        outcomes[s] = t.measure(s, basis, rng)
    c_x, c_z = decode_from_outcomes("cluster", outcomes, ctx)
    q1, q2 = part.distinguished
    t.apply_pauli(
        PauliError(frozenset((q1,)) if c_z else frozenset(), frozenset((q1,)) if c_x else frozenset())
    )
    return OracleRun(outcomes, (c_x, c_z), extract_bell_label(t, q1, q2))


# ---------------------------------------------------------------------------
# stabilizer-product identities
# ---------------------------------------------------------------------------


@dataclass
class IdentityReport:
    checked: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _incident_labels(g: BoundaryGraph, site: Site) -> FrozenSet[Site]:
    v = g.vert_index[site]
    return frozenset(g.labels[i] for (i, _) in g.adjacency[v])


def verify_stabilizer_identities(params: LatticeParams) -> IdentityReport:
    """Symbolically multiply the quoted products of cluster-state generators
    and compare against their claimed Pauli strings:

      - bulk internal vertices of the primal decoding graph: the product over
        the qubit neighborhood is Z on the incident A edges and X on the
        incident boundary edges (all-Z in the bulk),
      - sheet internal vertices: the single generator G_u,
      - dual internal vertices: all-Z on the incident dual edges,
      - S^X from the left bulk column, S^Z from the bottom rows.
    """
    if not params.is_cluster or params.d > 3 or params.r > 5:
        raise OracleError("identity suite runs at d <= 3, R <= 5")
    d, r = params.d, params.r
    qs = cluster_qubits(params)
    part = measurement_partition("cluster", params)
    bset = part.set_x | part.set_z | set(cluster_q1_q2(params))
    g, gd = build_cluster_decoding(params)
    rep = IdentityReport()

    def check(name: str, got: PauliOp, want_x: FrozenSet[Site], want_z: FrozenSet[Site]):
        rep.checked += 1
        ok = got.xset == want_x and got.zset == want_z and got.sign_bit() == 0
        if not ok:
            rep.failures.append(
                f"{name}: got X{sorted(got.xset)} Z{sorted(got.zset)} "
                f"sign {(-1) ** got.sign_bit()}"
            )

    for vi in np.flatnonzero(g.internal):
        u = g.verts[vi]
        inc = _incident_labels(g, u)
        if u[2] in (1, r):
            s_u = graph_state_generator(u, qs)
        else:
            s_u = product(graph_state_generator(v, qs) for v in sorted(neigh(u, qs)))
        check(f"S^{u} on {g.name}", s_u, inc & bset, inc - bset)

    for vi in np.flatnonzero(gd.internal):
        u = gd.verts[vi]
        inc = _incident_labels(gd, u)
        if u[2] in (1, r):
            shift = (0, 0, 1) if u[2] == 1 else (0, 0, -1)
            w = (u[0] + shift[0], u[1] + shift[1], u[2] + shift[2])
            ops = [graph_state_generator(w, qs)]
            ops += [
                graph_state_generator(v, qs)
                for v in sorted(neigh(u, qs) & bset)
            ]
            s_u = product(ops)
        else:
            s_u = product(graph_state_generator(v, qs) for v in sorted(neigh(u, qs)))
        check(f"S^{u} on {gd.name}", s_u, frozenset(), inc)

    q1, q2 = cluster_q1_q2(params)
    lx = {g.labels[i] for i in np.flatnonzero(g.recovery["L_cl,X"])}
    lx_a = {g.labels[i] for i in np.flatnonzero(g.recovery["L_cl,X&A"])}
    lx_b = {g.labels[i] for i in np.flatnonzero(g.recovery["L_cl,X&B"])}
    left_column = sorted(
        (1, u2, u3) for u2 in range(0, 2 * d - 1, 2) for u3 in range(2, r, 2)
    )
    s_x = product(graph_state_generator(u, qs) for u in left_column)
    check("S^X", s_x, frozenset(lx_b) | {q1, q2}, frozenset(lx_a))

    lz = {gd.labels[i] for i in np.flatnonzero(gd.recovery["L_cl,Z*"])}
    s_z = product(
        graph_state_generator(u, qs) for u in sorted(lz | {q1, q2})
    )
    check("S^Z", s_z, frozenset(), frozenset(lz) | {q1, q2})
    return rep
