# Simulation and decoding toolkit for fault-tolerant quantum-bus protocols:
# surface-code single-shot decoding and long-range entanglement generation on
# elongated 3D cluster states, with matching decoders, exact resilience
# census, converse experiments and a stabilizer-tableau validation oracle.

from .geometry import (
    InvalidParams,
    LatticeParams,
    MeasurementPartition,
    Site,
    cluster_qubits,
    measurement_partition,
    neigh,
    surface_qubits,
)
from .graphs import (
    BoundaryGraph,
    boundary,
    build_cluster_decoding,
    build_surface,
    build_surface_decoding,
    cycle_decompose,
    dump_graph,
    pairing,
)
from .matching import MatchRequest, brute_force_min_match, min_match
from .noise import (
    NoiseModel,
    PauliError,
    derive_gl,
    derive_surface_supports,
    parse_noise,
    sample_error,
    trial_rng,
)
from .oracle import (
    Tableau,
    build_cluster_state,
    build_half_encoded_bell,
    extract_bell_label,
    run_cluster_oracle,
    run_surface_oracle,
    verify_stabilizer_identities,
)
from .protocols import (
    ClusterContext,
    Outcome,
    SurfaceContext,
    TrialStats,
    build_cluster_context,
    build_surface_context,
    cluster_outcome,
    decode_from_outcomes,
    run_trials,
    surface_outcome,
    wilson_interval,
)
from .resilience import (
    PathCensus,
    closed_form_bound,
    enumerate_census,
    mismatch_probability_mc,
    res_value,
)
from .converse import (
    ConverseParams,
    converse_mc,
    latency_fail_lower_bound,
    latency_max_range,
    pr_appropriate_exact,
    straight_paths,
)

__version__ = "0.1.0"
