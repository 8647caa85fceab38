# geometry.py
# Sites, lattice parameters, qubit sets and the measurement partition for
# the 2D surface-code lattice and the 3D cluster lattice.
#
# Coordinate conventions:
#   - A Site is an integer triple (u1, u2, u3).
#   - 2D lattices fix u3 = 0 (sentinel plane); the cluster lattice places
#     its two surface-code layers at u3 = 1 and u3 = R.
#   - Parities matter: "e" = even coordinate, "o" = odd coordinate.
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Tuple

Site = Tuple[int, int, int]

PLANE_2D = 0  # sentinel u3 for 2D lattices


class InvalidParams(ValueError):
    """Lattice parameters outside their allowed range."""


@dataclass(frozen=True)
class LatticeParams:
    """Code distance d (>= 2) and, for cluster lattices, odd bus length R (>= 3)."""

    d: int
    r: int | None = None

    def __post_init__(self):
        if self.d < 2:
            raise InvalidParams(f"code distance d must be >= 2, got {self.d}")
        if self.r is not None:
            if self.r < 3 or self.r % 2 == 0:
                raise InvalidParams(f"bus length R must be odd and >= 3, got {self.r}")

    @property
    def is_cluster(self) -> bool:
        return self.r is not None


@dataclass(frozen=True)
class MeasurementPartition:
    """Disjoint split of the qubit set into Z-measured bulk (set_a), X-measured
    (set_x), Z-measured (set_z) boundary qubits and the unmeasured distinguished
    qubits.  Surface lattices have set_a empty and one distinguished qubit."""

    set_a: FrozenSet[Site]
    set_x: FrozenSet[Site]
    set_z: FrozenSet[Site]
    distinguished: Tuple[Site, ...]


def site_in_bounds_2d(u: Site, d: int) -> bool:
    return u[2] == PLANE_2D and 0 <= u[0] <= 2 * d and 0 <= u[1] <= 2 * d - 2


def site_in_bounds_3d(u: Site, d: int, r: int) -> bool:
    return 0 <= u[0] <= 2 * d and 0 <= u[1] <= 2 * d - 2 and 1 <= u[2] <= r


def surface_qubits(params: LatticeParams) -> FrozenSet[Site]:
    """Qubit sites of the distance-d surface code: the midpoints of the primal
    and dual lattice edges, i.e. mixed-parity sites with 1 <= u1 <= 2d-1 and
    0 <= u2 <= 2d-2.  Exactly 2d^2 - 2d + 1 sites."""
    d = params.d
    out = set()
    for u1 in range(1, 2 * d):
        for u2 in range(0, 2 * d - 1):
            if (u1 + u2) % 2 == 1:
                out.add((u1, u2, PLANE_2D))
    return frozenset(out)


def cluster_qubits(params: LatticeParams) -> FrozenSet[Site]:
    """Qubit sites of the cluster lattice C[d x d x R]: sites with
    1 <= u1 <= 2d-1, 0 <= u2 <= 2d-2, 1 <= u3 <= R, excluding the all-odd and
    all-even parity classes."""
    if not params.is_cluster:
        raise InvalidParams("cluster_qubits requires R")
    d, r = params.d, params.r
    out = set()
    for u1 in range(1, 2 * d):
        for u2 in range(0, 2 * d - 1):
            for u3 in range(1, r + 1):
                p = (u1 % 2, u2 % 2, u3 % 2)
                if p == (1, 1, 1) or p == (0, 0, 0):
                    continue
                out.add((u1, u2, u3))
    return frozenset(out)


def neigh(u: Site, qubits: Iterable[Site]) -> FrozenSet[Site]:
    """Qubits at Manhattan distance 1 from site u (u itself need not be a qubit)."""
    qs = qubits if isinstance(qubits, (set, frozenset)) else frozenset(qubits)
    u1, u2, u3 = u
    cand = (
        (u1 - 1, u2, u3),
        (u1 + 1, u2, u3),
        (u1, u2 - 1, u3),
        (u1, u2 + 1, u3),
        (u1, u2, u3 - 1),
        (u1, u2, u3 + 1),
    )
    return frozenset(v for v in cand if v in qs)


SURFACE_Q: Site = (1, 0, PLANE_2D)


def cluster_q1_q2(params: LatticeParams) -> Tuple[Site, Site]:
    return (1, 0, 1), (1, 0, params.r)


def measurement_partition(kind: str, params: LatticeParams) -> MeasurementPartition:
    """Measurement pattern of the protocols.

    surface: q = (1,0) unmeasured; within the rest the upper-left triangle
    (u2 >= u1 + 1) is X-measured and the lower-right triangle Z-measured.

    cluster: the boundary set B = {(e,o,1),(o,e,1),(e,o,R),(o,e,R)} carries the
    same triangular X/Z split minus {q1, q2}; every other qubit (the set A) is
    Z-measured.
    """
    if kind == "surface":
        qs = surface_qubits(params)
        q = SURFACE_Q
        xset = frozenset(u for u in qs if u != q and u[1] >= u[0] + 1)
        zset = frozenset(u for u in qs if u != q and u[1] < u[0] + 1)
        return MeasurementPartition(frozenset(), xset, zset, (q,))
    if kind == "cluster":
        if not params.is_cluster:
            raise InvalidParams("cluster partition requires R")
        qs = cluster_qubits(params)
        r = params.r
        q1, q2 = cluster_q1_q2(params)
        bset = frozenset(
            u for u in qs if u[2] in (1, r) and (u[0] + u[1]) % 2 == 1
        )
        aset = qs - bset
        rest = bset - {q1, q2}
        xset = frozenset(u for u in rest if u[1] >= 1 + u[0])
        zset = frozenset(u for u in rest if u[1] < 1 + u[0])
        return MeasurementPartition(aset, xset, zset, (q1, q2))
    raise InvalidParams(f"unknown lattice kind {kind!r}")
