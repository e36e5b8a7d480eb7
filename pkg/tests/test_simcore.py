import numpy as np
import pytest
from numpy.testing import assert_allclose

from geqie.errors import CapacityError, DomainError
from geqie.simcore import (
    CountsHistogram,
    DensityMatrix,
    NoiseMode,
    NoiseSpec,
    StateVector,
    apply_all_qubit_depolarizing,
    apply_global_depolarizing,
    apply_local_depolarizing,
    exact_noisy_probabilities,
    global_noisy_probabilities,
    measure_probabilities,
    per_qubit_noisy_probabilities,
    sample_counts,
    sample_counts_trajectories,
    to_density,
    trajectory_shard,
)

PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def random_state(n, seed):
    gen = np.random.default_rng(seed)
    amps = gen.normal(size=1 << n) + 1j * gen.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def random_density(n, seed):
    gen = np.random.default_rng(seed)
    dim = 1 << n
    m = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return DensityMatrix(n, rho / np.trace(rho))


def kraus_depolarizing_oracle(rho, lam, qubit):
    """Independent reference: explicit Kraus sum with Pauli weights
    (1 - 3 lam/4, lam/4, lam/4, lam/4) on the designated qubit."""
    n = rho.n_qubits
    out = np.zeros_like(rho.entries)
    for name, weight in [("I", 1 - 0.75 * lam), ("X", lam / 4),
                         ("Y", lam / 4), ("Z", lam / 4)]:
        op = np.kron(np.eye(1 << (n - 1 - qubit)),
                     np.kron(PAULIS[name], np.eye(1 << qubit)))
        out += weight * (op @ rho.entries @ op.conj().T)
    return out


# -- value types -------------------------------------------------------------

def test_statevector_rejects_bad_norm():
    with pytest.raises(DomainError):
        StateVector(1, [1.0, 1.0])


def test_statevector_rejects_wrong_length():
    with pytest.raises(DomainError):
        StateVector(2, [1.0, 0.0])


def test_density_matrix_rejects_non_hermitian():
    with pytest.raises(DomainError):
        DensityMatrix(1, [[0.5, 0.5], [0.2, 0.5]])


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(DomainError):
        DensityMatrix(1, [[0.9, 0], [0, 0.9]])


def test_noise_spec_validates_lambda():
    with pytest.raises(DomainError):
        NoiseSpec(1.5)
    with pytest.raises(DomainError):
        NoiseSpec(-0.1)
    assert NoiseSpec(0.3).mode is NoiseMode.TRAJECTORIES


def test_counts_histogram_checks_totals():
    with pytest.raises(DomainError):
        CountsHistogram(1, {0: 3, 1: 4}, shots=10)
    hist = CountsHistogram(1, {0: 3, 1: 7}, shots=10)
    assert_allclose(hist.to_weights(), [3.0, 7.0])


# -- to_density ----------------------------------------------------------------

def test_to_density_basis_state():
    rho = to_density(StateVector.basis(1, 0))
    assert_allclose(rho.entries, [[1, 0], [0, 0]], atol=1e-15)


def test_to_density_uniform_superposition():
    state = StateVector.from_amplitudes([1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert_allclose(to_density(state).entries, np.full((2, 2), 0.5), atol=1e-15)


def test_to_density_matches_outer_product_oracle():
    state = random_state(2, seed=5)
    rho = to_density(state)
    oracle = np.outer(state.amplitudes, state.amplitudes.conj())
    assert_allclose(rho.entries, oracle, atol=1e-14)
    assert_allclose(np.trace(rho.entries), 1.0, atol=1e-12)
    assert_allclose(np.trace(rho.entries @ rho.entries), 1.0, atol=1e-12)


def test_to_density_enforces_the_memory_cap():
    with pytest.raises(CapacityError):
        to_density(StateVector.basis(13, 0))


# -- depolarizing channels -----------------------------------------------------

def test_global_depolarizing_identity_at_zero():
    rho = random_density(2, seed=1)
    assert_allclose(apply_global_depolarizing(rho, 0.0).entries, rho.entries)


def test_global_depolarizing_fully_mixed_at_one():
    rho = random_density(2, seed=2)
    assert_allclose(apply_global_depolarizing(rho, 1.0).entries,
                    np.eye(4) / 4, atol=1e-12)


def test_global_depolarizing_hand_evaluated():
    rho = DensityMatrix(1, [[1, 0], [0, 0]])
    out = apply_global_depolarizing(rho, 0.5)
    assert_allclose(out.entries, [[0.75, 0], [0, 0.25]], atol=1e-15)


def test_global_depolarizing_rejects_bad_lambda():
    rho = random_density(1, seed=3)
    with pytest.raises(DomainError):
        apply_global_depolarizing(rho, 1.2)


def test_local_depolarizing_identity_at_zero():
    rho = random_density(3, seed=4)
    assert_allclose(apply_local_depolarizing(rho, 0.0, 1).entries, rho.entries)


def test_local_depolarizing_mixes_fully_at_one():
    rho = to_density(StateVector.basis(1, 0))
    assert_allclose(apply_local_depolarizing(rho, 1.0, 0).entries,
                    np.eye(2) / 2, atol=1e-12)


def test_local_depolarizing_scales_coherences():
    plus = StateVector.from_amplitudes([1 / np.sqrt(2), 1 / np.sqrt(2)])
    out = apply_local_depolarizing(to_density(plus), 0.4, 0)
    assert_allclose(out.entries, [[0.5, 0.3], [0.3, 0.5]], atol=1e-12)


@pytest.mark.parametrize("n,qubit,lam", [(1, 0, 0.3), (2, 0, 0.7), (3, 1, 0.25),
                                         (3, 2, 1.0), (4, 3, 0.05)])
def test_local_depolarizing_matches_kraus_oracle(n, qubit, lam):
    rho = random_density(n, seed=10 * n + qubit)
    out = apply_local_depolarizing(rho, lam, qubit)
    assert_allclose(out.entries, kraus_depolarizing_oracle(rho, lam, qubit),
                    atol=1e-12)


def test_local_depolarizing_rejects_bad_qubit():
    rho = random_density(2, seed=6)
    with pytest.raises(IndexError):
        apply_local_depolarizing(rho, 0.1, 2)


def test_all_qubit_depolarizing_limits():
    rho = random_density(3, seed=7)
    assert_allclose(apply_all_qubit_depolarizing(rho, 0.0).entries, rho.entries)
    assert_allclose(apply_all_qubit_depolarizing(rho, 1.0).entries,
                    np.eye(8) / 8, atol=1e-12)


def test_all_qubit_matches_sequential_single_qubit_calls():
    bell = StateVector.from_amplitudes([1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)])
    rho = to_density(bell)
    sequential = apply_local_depolarizing(apply_local_depolarizing(rho, 0.1, 0), 0.1, 1)
    assert_allclose(apply_all_qubit_depolarizing(rho, 0.1).entries,
                    sequential.entries, atol=1e-12)


def test_local_channels_commute_across_qubits():
    rho = random_density(3, seed=8)
    order_a = apply_local_depolarizing(apply_local_depolarizing(rho, 0.35, 0), 0.2, 2)
    order_b = apply_local_depolarizing(apply_local_depolarizing(rho, 0.2, 2), 0.35, 0)
    assert_allclose(order_a.entries, order_b.entries, atol=1e-10)


@pytest.mark.parametrize("lam", [0.0, 0.01, 0.2, 0.9, 1.0])
def test_global_channel_preserves_density_invariants(lam):
    rho = random_density(3, seed=int(lam * 100) + 11)
    out = apply_global_depolarizing(rho, lam)
    assert np.max(np.abs(out.entries - out.entries.conj().T)) <= 1e-10
    assert abs(np.trace(out.entries) - 1.0) <= 1e-10
    assert np.min(np.linalg.eigvalsh(out.entries)) >= -1e-9


def test_diagonal_identity_of_the_global_channel():
    rho = random_density(3, seed=12)
    for lam in (0.0, 0.01, 0.1, 0.2, 0.5, 0.9, 1.0):
        lhs = measure_probabilities(apply_global_depolarizing(rho, lam))
        rhs = (1 - lam) * measure_probabilities(rho) + lam / 8
        assert_allclose(lhs, rhs, atol=1e-10)


def test_exact_probability_helpers_match_density_route():
    state = random_state(3, seed=13)
    rho = to_density(state)
    for lam in (0.05, 0.4, 1.0):
        assert_allclose(
            global_noisy_probabilities(measure_probabilities(state), lam),
            measure_probabilities(apply_global_depolarizing(rho, lam)),
            atol=1e-12,
        )
        assert_allclose(
            per_qubit_noisy_probabilities(measure_probabilities(state), lam),
            measure_probabilities(apply_all_qubit_depolarizing(rho, lam)),
            atol=1e-12,
        )


def test_exact_noisy_probabilities_mode_dispatch():
    state = random_state(2, seed=14)
    probs = measure_probabilities(state)
    assert_allclose(exact_noisy_probabilities(state, None), probs)
    out = exact_noisy_probabilities(state, NoiseSpec(1.0, NoiseMode.GLOBAL))
    assert_allclose(out, np.full(4, 0.25), atol=1e-12)
    with pytest.raises(DomainError):
        exact_noisy_probabilities(state, NoiseSpec(0.5, NoiseMode.TRAJECTORIES))


# -- measurement ---------------------------------------------------------------

def test_measure_probabilities_basis_state():
    assert_allclose(measure_probabilities(StateVector.basis(1, 0)), [1, 0])


def test_measure_probabilities_mixed_diagonal():
    rho = DensityMatrix(2, np.eye(4) / 4)
    assert_allclose(measure_probabilities(rho), np.full(4, 0.25))


def test_measure_probabilities_complex_amplitudes():
    state = StateVector.from_amplitudes([1 / np.sqrt(2), 1j / np.sqrt(2)])
    assert_allclose(measure_probabilities(state), [0.5, 0.5], atol=1e-15)


def test_measure_probabilities_clamps_negative_drift():
    entries = np.diag([1.0 + 5e-13, -5e-13]).astype(complex)
    probs = measure_probabilities(DensityMatrix(1, entries))
    assert probs[1] == 0.0
    assert_allclose(probs.sum(), 1.0)


# -- sampling ------------------------------------------------------------------

def test_sample_counts_deterministic_outcome():
    hist = sample_counts([1.0, 0.0], shots=100, seed=5)
    assert hist.counts == {0: 100}


def test_sample_counts_binomial_bound():
    hist = sample_counts([0.5, 0.5], shots=10 ** 6, seed=17)
    # 4 sigma of a fair binomial at 1e6 shots
    assert abs(hist.counts[0] / 10 ** 6 - 0.5) <= 0.002


def test_sample_counts_seed_determinism():
    a = sample_counts([0.3, 0.2, 0.4, 0.1], shots=5000, seed=21)
    b = sample_counts([0.3, 0.2, 0.4, 0.1], shots=5000, seed=21)
    assert a.counts == b.counts


def test_sample_counts_rejects_zero_shots():
    with pytest.raises(DomainError):
        sample_counts([0.5, 0.5], shots=0, seed=0)


def test_sample_counts_rejects_unnormalized():
    with pytest.raises(DomainError):
        sample_counts([0.5, 0.6], shots=10, seed=0)


# -- trajectories ----------------------------------------------------------------

def tv_distance(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def test_trajectories_noiseless_matches_ideal_distribution():
    state = random_state(2, seed=30)
    hist = sample_counts_trajectories(state, 0.0, 200_000, seed=31)
    empirical = hist.to_weights() / 200_000
    assert tv_distance(empirical, measure_probabilities(state)) <= 0.01


def test_trajectories_fully_mixed_limit():
    state = StateVector.basis(3, 5)
    hist = sample_counts_trajectories(state, 1.0, 500_000, seed=32)
    assert tv_distance(hist.to_weights() / 500_000, np.full(8, 0.125)) <= 0.02


@pytest.mark.parametrize("n,lam", [(3, 0.1), (6, 0.1), (6, 0.5)])
def test_trajectories_match_density_matrix_oracle(n, lam):
    state = random_state(n, seed=33 + n)
    hist = sample_counts_trajectories(state, lam, 10 ** 6, seed=34)
    exact = measure_probabilities(apply_all_qubit_depolarizing(to_density(state), lam))
    assert tv_distance(hist.to_weights() / 10 ** 6, exact) <= 0.02


def test_trajectories_seed_determinism():
    state = random_state(3, seed=35)
    a = sample_counts_trajectories(state, 0.2, 40_000, seed=36)
    b = sample_counts_trajectories(state, 0.2, 40_000, seed=36)
    assert a.counts == b.counts


def test_trajectory_shards_merge_independent_of_split():
    state = random_state(4, seed=37)
    full = trajectory_shard(state, 0.3, 38, 0, 50_000)
    splits = [(0, 1), (1, 1337), (1337, 20_000), (20_000, 50_000)]
    merged = sum(trajectory_shard(state, 0.3, 38, a, b) for a, b in splits)
    assert np.array_equal(full, merged)


def test_trajectory_shard_crosses_chunk_boundary():
    state = random_state(2, seed=39)
    stop = (1 << 17) + 123
    full = trajectory_shard(state, 0.5, 40, 0, stop)
    merged = trajectory_shard(state, 0.5, 40, 0, 99_999) \
        + trajectory_shard(state, 0.5, 40, 99_999, stop)
    assert np.array_equal(full, merged)
