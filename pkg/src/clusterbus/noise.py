# noise.py
# Pauli error representation, i.i.d. noise samplers with per-trial seeded
# streams, and the maps from a physical error to the edge sets fed into the
# matching decoders.
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Sequence, Tuple

import numpy as np

from .geometry import Site

KINDS = ("depolarizing", "bitflip", "phaseflip", "xz")


class NoiseError(ValueError):
    pass


class SupportOutOfLattice(NoiseError):
    pass


@dataclass(frozen=True)
class PauliError:
    """X-support and Z-support site sets; Y errors live in both."""

    xsupp: FrozenSet[Site]
    zsupp: FrozenSet[Site]

    @property
    def supp(self) -> FrozenSet[Site]:
        return self.xsupp | self.zsupp

    @staticmethod
    def identity() -> "PauliError":
        return PauliError(frozenset(), frozenset())


@dataclass(frozen=True)
class NoiseModel:
    """i.i.d. single-qubit model; depolarizing applies X, Y, Z each with
    probability p/3.  Any i.i.d. model with per-qubit error probability q is
    local stochastic with strength exactly q."""

    kind: str
    p: float = 0.0
    pz: float = 0.0  # second rate, xz only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise NoiseError(f"unknown noise kind {self.kind!r}")
        for rate in (self.p, self.pz):
            if not 0.0 <= rate <= 1.0:
                raise NoiseError(f"rate {rate} outside [0, 1]")

    def spell(self) -> str:
        if self.kind == "xz":
            return f"xz:{self.p:g},{self.pz:g}"
        return f"{self.kind}:{self.p:g}"


def parse_noise(spec: str) -> NoiseModel:
    """Parse 'depolarizing:<p>', 'bitflip:<p>', 'phaseflip:<p>' or 'xz:<px>,<pz>'."""
    try:
        kind, _, rates = spec.partition(":")
        if kind == "xz":
            px, pz = (float(t) for t in rates.split(","))
            return NoiseModel("xz", px, pz)
        return NoiseModel(kind, float(rates))
    except NoiseError:
        raise
    except Exception as exc:
        raise NoiseError(f"bad noise spec {spec!r}") from exc


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream: an independent generator per (seed, trial) pair,
    reproducible under any parallel schedule."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, trial)))


def sample_error(
    model: NoiseModel, qubits: Sequence[Site], rng: np.random.Generator
) -> PauliError:
    """One independent draw per qubit; `qubits` must be in a fixed order for
    reproducibility."""
    n = len(qubits)
    u = rng.random(n)
    if model.kind == "depolarizing":
        third = model.p / 3.0
        x_idx = np.flatnonzero(u < 2.0 * third)           # X or Y
        z_idx = np.flatnonzero((u >= third) & (u < model.p))  # Y or Z
    elif model.kind == "bitflip":
        x_idx = np.flatnonzero(u < model.p)
        z_idx = np.empty(0, dtype=np.int64)
    elif model.kind == "phaseflip":
        z_idx = np.flatnonzero(u < model.p)
        x_idx = np.empty(0, dtype=np.int64)
    else:  # xz
        x_idx = np.flatnonzero(u < model.p)
        z_idx = np.flatnonzero(rng.random(n) < model.pz)
    return PauliError(
        frozenset(qubits[int(i)] for i in x_idx),
        frozenset(qubits[int(i)] for i in z_idx),
    )


def _edge_bits(graph, sites: FrozenSet[Site]) -> np.ndarray:
    es = graph.empty_edge_set()
    lut = graph.label_to_edge
    for s in sites:
        i = lut.get(s)
        if i is not None:
            es[i] = True
    return es


def derive_surface_supports(E: PauliError, ctx) -> Tuple[np.ndarray, np.ndarray]:
    """Project the error onto the decoding graphs of a surface context:
    Z-support restricted to X-measured qubits as T_dec edges, X-support
    restricted to Z-measured qubits as T_dec* edges."""
    _check_support(E, ctx.qubit_set)
    ez = _edge_bits(ctx.tdec, E.zsupp)
    ex = _edge_bits(ctx.tdec_dual, E.xsupp)
    return ez, ex


def derive_gl(E: PauliError, ctx) -> Tuple[np.ndarray, np.ndarray]:
    """The glued errors of a cluster context: on T_cl,dec the X-support on
    Z-measured bulk edges plus the Z-support on X-measured edges; on T_cl,dec*
    the X-support on every dual-labeled qubit."""
    _check_support(E, ctx.qubit_set)
    g = ctx.tcl_dec
    egl = g.empty_edge_set()
    lut = g.label_to_edge
    for s in E.xsupp:
        i = lut.get(s)
        if i is not None and s in ctx.partition.set_a:
            egl[i] = True
    for s in E.zsupp:
        i = lut.get(s)
        if i is not None and s in ctx.partition.set_x:
            egl[i] = True
    egl_dual = _edge_bits(ctx.tcl_dec_dual, E.xsupp)
    return egl, egl_dual


def _check_support(E: PauliError, qubit_set: FrozenSet[Site]):
    if not E.supp <= qubit_set:
        bad = sorted(E.supp - qubit_set)[:3]
        raise SupportOutOfLattice(f"error touches non-lattice sites {bad}")
