import itertools
import math

import numpy as np
import pytest

from clusterbus.geometry import LatticeParams
from clusterbus.noise import NoiseModel, PauliError
from clusterbus.protocols import (
    Outcome,
    cluster_outcome,
    decode_from_outcomes,
    run_trials,
    surface_outcome,
    wilson_interval,
)


def test_identity_outcomes(surface_d2, cluster_d2r3):
    E = PauliError.identity()
    assert surface_outcome(E, surface_d2) == Outcome(0, 0)
    assert cluster_outcome(E, cluster_d2r3) == Outcome(0, 0)


def test_surface_zq(surface_d2):
    E = PauliError(frozenset(), frozenset({(1, 0, 0)}))
    assert surface_outcome(E, surface_d2) == Outcome(1, 0)


def test_cluster_xq1(cluster_d2r3):
    E = PauliError(frozenset({(1, 0, 1)}), frozenset())
    assert cluster_outcome(E, cluster_d2r3) == Outcome(0, 1)


def test_outcome_deterministic(surface_d3):
    rng = np.random.default_rng(2)
    for _ in range(20):
        E = PauliError(
            frozenset(q for q in surface_d3.qubits if rng.random() < 0.2),
            frozenset(q for q in surface_d3.qubits if rng.random() < 0.2),
        )
        assert surface_outcome(E, surface_d3) == surface_outcome(E, surface_d3)


def test_basis_aligned_errors_are_silent(surface_d3, cluster_d2r3):
    # Z errors on Z-measured qubits and X errors on X-measured qubits never
    # change the outcome
    rng = np.random.default_rng(3)
    for _ in range(20):
        base = PauliError(
            frozenset(q for q in surface_d3.qubits if rng.random() < 0.15),
            frozenset(q for q in surface_d3.qubits if rng.random() < 0.15),
        )
        part = surface_d3.partition
        silent_x = frozenset(q for q in part.set_x if rng.random() < 0.5)
        silent_z = frozenset(q for q in part.set_z if rng.random() < 0.5)
        tweaked = PauliError(base.xsupp ^ silent_x, base.zsupp ^ silent_z)
        assert surface_outcome(base, surface_d3) == surface_outcome(tweaked, surface_d3)
    for _ in range(20):
        base = PauliError(
            frozenset(q for q in cluster_d2r3.qubits if rng.random() < 0.15),
            frozenset(q for q in cluster_d2r3.qubits if rng.random() < 0.15),
        )
        part = cluster_d2r3.partition
        silent_x = frozenset(q for q in part.set_x if rng.random() < 0.5)
        silent_z = frozenset(
            q for q in (part.set_z | part.set_a) if rng.random() < 0.5
        )
        tweaked = PauliError(base.xsupp ^ silent_x, base.zsupp ^ silent_z)
        assert cluster_outcome(base, cluster_d2r3) == cluster_outcome(
            tweaked, cluster_d2r3
        )


def test_decode_all_zero_outcomes(surface_d2, cluster_d2r3):
    part = surface_d2.partition
    outcomes = {s: 0 for s in part.set_x | part.set_z}
    assert decode_from_outcomes("surface", outcomes, surface_d2) == (0, 0)
    part = cluster_d2r3.partition
    outcomes = {s: 0 for s in part.set_a | part.set_x | part.set_z}
    assert decode_from_outcomes("cluster", outcomes, cluster_d2r3) == (0, 0)


def test_decode_outcome_size_check(surface_d2):
    with pytest.raises(ValueError):
        decode_from_outcomes("surface", {(1, 2, 0): 0}, surface_d2)


def test_run_trials_p0(surface_d2):
    stats = run_trials(
        "surface", LatticeParams(2), NoiseModel("depolarizing", 0.0), 200, 0,
        ctx=surface_d2,
    )
    assert stats.nu00_hat == 1.0
    assert stats.counts == (200, 0, 0, 0)


def test_run_trials_thread_determinism(surface_d2):
    model = NoiseModel("depolarizing", 0.05)
    a = run_trials("surface", LatticeParams(2), model, 400, 7, threads=1, ctx=surface_d2)
    b = run_trials("surface", LatticeParams(2), model, 400, 7, threads=4, ctx=surface_d2)
    assert a.counts == b.counts


def exact_surface_bitflip_nu00(ctx, p):
    """Weight enumeration over all X-error patterns."""
    qubits = ctx.qubits
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=len(qubits)):
        xs = frozenset(q for q, b in zip(qubits, pattern) if b)
        w = len(xs)
        pr = p**w * (1 - p) ** (len(qubits) - w)
        if surface_outcome(PauliError(xs, frozenset()), ctx) == Outcome(0, 0):
            total += pr
    return total


def test_mc_matches_exact_enumeration(surface_d2):
    p = 0.1
    exact = exact_surface_bitflip_nu00(surface_d2, p)
    stats = run_trials(
        "surface", LatticeParams(2), NoiseModel("bitflip", p), 20000, 5,
        ctx=surface_d2,
    )
    sigma = math.sqrt(exact * (1 - exact) / stats.trials)
    assert abs(stats.nu00_hat - exact) <= 3 * sigma


@pytest.mark.slow
def test_cluster_bound_d5_r11():
    # 1 - nu00 stays below the analytic failure bound at d=5, R=11, p=1e-4
    from clusterbus.resilience import closed_form_bound

    p = 1e-4
    stats = run_trials("cluster", LatticeParams(5, 11),
                       NoiseModel("depolarizing", p), 10_000, 23)
    lo, _ = stats.nu00_interval()
    assert 1 - lo <= closed_form_bound("cluster-failure", p, d=5, r=11)


@pytest.mark.slow
def test_cluster_failure_monotone_in_d():
    # at fixed depolarizing rate the failure estimate does not grow with d
    model = NoiseModel("depolarizing", 0.003)
    fails, sigmas = [], []
    trials = 3000
    for d in (3, 5, 7):
        stats = run_trials("cluster", LatticeParams(d, 11), model, trials, 17)
        f = 1.0 - stats.nu00_hat
        fails.append(f)
        sigmas.append(math.sqrt(max(f * (1 - f), 1 / trials) / trials))
    assert fails[1] <= fails[0] + 3 * (sigmas[0] + sigmas[1])
    assert fails[2] <= fails[1] + 3 * (sigmas[1] + sigmas[2])


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert wilson_interval(0, 100)[0] == pytest.approx(0.0, abs=1e-12)
    assert wilson_interval(100, 100)[1] == pytest.approx(1.0, abs=1e-12)
    lo, _ = wilson_interval(999, 1000)
    assert lo > 0.99


def test_trialstats_tally_check():
    from clusterbus.protocols import TrialStats

    with pytest.raises(ValueError):
        TrialStats("surface", LatticeParams(2), NoiseModel("bitflip", 0.1), 10, 0,
                   (1, 2, 3, 5))
