"""Dense statevector / density-matrix kernels with depolarizing noise.

Bit convention (used everywhere in this package): qubit 0 is the least
significant bit of a computational-basis index, so the basis state
``|b_{n-1} ... b_1 b_0>`` has index ``sum(b_q << q)``.

Two noise fidelities are provided and cross-checked by the test suite:

* exact channel application on density matrices, practical up to
  :data:`DENSITY_MAX_QUBITS` (a 12-qubit density matrix already holds
  2^24 complex entries, about 268 MB);
* Monte Carlo Pauli-insertion trajectories on statevectors, which only
  need statevector-sized memory and scale much further.

For computational-basis measurements both per-qubit forms admit an exact
diagonal algebra: the global channel maps probabilities to
``(1 - lam) p + lam / 2^n`` and the single-qubit channel on qubit ``q``
maps them to ``(1 - lam/2) p + (lam/2) p[flip q]``.  The exact-probability
helpers below use that algebra; the density-matrix operators remain the
ground truth it is tested against.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError
from .rng import generator, generator_at

NORM_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-9
PROB_SUM_ATOL = 1e-9
NEGATIVE_CLAMP = 1e-12

#: Exact density-matrix simulation is refused above this many qubits.
DENSITY_MAX_QUBITS = 12

#: Rows of trajectory uniforms processed per chunk (bounds peak memory).
_TRAJECTORY_CHUNK = 1 << 17


def _require_power_of_two(dim: int, what: str) -> int:
    n = int(dim).bit_length() - 1
    if dim <= 0 or (1 << n) != dim:
        raise DomainError(f"{what} must have a power-of-two length, got {dim}")
    return n


@dataclass(frozen=True)
class StateVector:
    """A pure n-qubit state as 2^n complex amplitudes (unit norm).

    Treat instances as immutable; the amplitude array is never mutated by
    package code and is safe to share across threads.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        if self.n_qubits < 1:
            raise DomainError("a state needs at least one qubit")
        if amps.shape != (1 << self.n_qubits,):
            raise DomainError(
                f"expected {1 << self.n_qubits} amplitudes, got {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise DomainError(f"state is not normalized: sum |a|^2 = {norm_sq!r}")

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = _require_power_of_two(amps.size, "amplitude vector")
        return cls(max(n, 1), amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)


@dataclass(frozen=True)
class DensityMatrix:
    """A 2^n x 2^n Hermitian, trace-one, PSD operator.

    Construction checks Hermiticity, unit trace, and the cheap necessary
    PSD condition (real diagonal >= -1e-9).  The full eigenvalue check is
    O(8^n) and is available separately via :meth:`eigenvalues`.
    """

    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        ent = np.ascontiguousarray(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", ent)
        dim = 1 << self.n_qubits
        if ent.shape != (dim, dim):
            raise DomainError(f"expected a {dim}x{dim} matrix, got {ent.shape}")
        if np.max(np.abs(ent - ent.conj().T)) > HERMITIAN_ATOL:
            raise DomainError("density matrix is not Hermitian")
        trace = complex(np.trace(ent))
        if abs(trace - 1.0) > TRACE_ATOL:
            raise DomainError(f"density matrix trace is {trace!r}, expected 1")
        diag = np.real(np.diagonal(ent))
        if np.min(diag) < -PSD_ATOL:
            raise DomainError("density matrix has a negative diagonal entry")

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


class NoiseMode(enum.Enum):
    GLOBAL = "global"
    PER_QUBIT = "per-qubit"
    TRAJECTORIES = "trajectories"

    @classmethod
    def parse(cls, name: str) -> "NoiseMode":
        for mode in cls:
            if mode.value == name:
                return mode
        raise DomainError(
            f"unknown noise mode {name!r}; expected one of "
            + ", ".join(m.value for m in cls)
        )


@dataclass(frozen=True)
class NoiseSpec:
    """Depolarizing-noise request: error probability and application mode.

    ``GLOBAL`` applies the n-qubit channel ``(1-lam) rho + lam I/2^n``,
    ``PER_QUBIT`` the tensor product of single-qubit channels, and
    ``TRAJECTORIES`` the Monte Carlo realization of the per-qubit channel
    (valid only when shots are sampled).
    """

    lam: float
    mode: NoiseMode = NoiseMode.TRAJECTORIES

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class CountsHistogram:
    """Measurement counts keyed by basis index, plus the total shot count."""

    n_qubits: int
    counts: dict = field(default_factory=dict)
    shots: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise DomainError("a histogram needs at least one shot")
        dim = 1 << self.n_qubits
        total = 0
        for index, count in self.counts.items():
            if not 0 <= index < dim:
                raise DomainError(f"basis index {index} out of range for n={self.n_qubits}")
            if count < 0:
                raise DomainError("counts must be non-negative")
            total += count
        if total != self.shots:
            raise DomainError(f"counts sum to {total}, expected shots={self.shots}")

    @classmethod
    def from_vector(cls, vector, n_qubits: int) -> "CountsHistogram":
        vec = np.asarray(vector)
        counts = {int(i): int(c) for i, c in enumerate(vec) if c > 0}
        return cls(n_qubits, counts, int(vec.sum()))

    def to_weights(self) -> np.ndarray:
        """Dense non-negative weight vector of length 2^n (counts as floats)."""
        weights = np.zeros(1 << self.n_qubits)
        for index, count in self.counts.items():
            weights[index] = count
        return weights


# ---------------------------------------------------------------------------
# channel operators


def to_density(state: StateVector, max_qubits: int = DENSITY_MAX_QUBITS) -> DensityMatrix:
    """Outer product ``|psi><psi|`` of a pure state."""
    if state.n_qubits > max_qubits:
        raise CapacityError(state.n_qubits, max_qubits, what="density-matrix qubits")
    entries = np.outer(state.amplitudes, state.amplitudes.conj())
    return DensityMatrix(state.n_qubits, entries)


def apply_global_depolarizing(rho: DensityMatrix, lam: float) -> DensityMatrix:
    """The n-qubit channel ``(1 - lam) rho + lam Tr[rho] I / 2^n``."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    dim = 1 << rho.n_qubits
    trace = np.real(np.trace(rho.entries))
    out = (1.0 - lam) * rho.entries + (lam * trace / dim) * np.eye(dim)
    return DensityMatrix(rho.n_qubits, out)


def apply_local_depolarizing(rho: DensityMatrix, lam: float, qubit: int) -> DensityMatrix:
    """Single-qubit depolarizing channel with parameter ``lam`` on ``qubit``.

    Kraus weights are ``1 - 3 lam/4`` for the identity and ``lam/4`` for each
    Pauli conjugation, which equals ``(1 - lam) rho + lam I/2`` on that qubit;
    the implementation uses the equivalent replace-with-maximally-mixed form.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for an {n}-qubit matrix")
    high = 1 << (n - 1 - qubit)
    low = 1 << qubit
    r6 = rho.entries.reshape(high, 2, low, high, 2, low)
    traced = r6[:, 0, :, :, 0, :] + r6[:, 1, :, :, 1, :]
    out = (1.0 - lam) * r6
    out[:, 0, :, :, 0, :] += (lam / 2.0) * traced
    out[:, 1, :, :, 1, :] += (lam / 2.0) * traced
    return DensityMatrix(n, out.reshape(1 << n, 1 << n))


def apply_all_qubit_depolarizing(rho: DensityMatrix, lam: float) -> DensityMatrix:
    """Compose the single-qubit channel over every qubit (ascending index).

    The channels act on disjoint qubits and commute, so the order does not
    affect the result.
    """
    out = rho
    for qubit in range(rho.n_qubits):
        out = apply_local_depolarizing(out, lam, qubit)
    return out


# ---------------------------------------------------------------------------
# measurement and sampling


def measure_probabilities(source) -> np.ndarray:
    """Computational-basis probabilities of a state or density matrix.

    Tiny negative diagonal values caused by floating-point drift (down to
    ``-1e-9``, the PSD tolerance) are clamped to zero and the vector is
    renormalized to sum exactly to one.
    """
    if isinstance(source, StateVector):
        probs = np.abs(source.amplitudes) ** 2
    elif isinstance(source, DensityMatrix):
        probs = np.real(np.diagonal(source.entries)).copy()
    else:
        raise DomainError(f"cannot measure a {type(source).__name__}")
    if np.min(probs) < -PSD_ATOL:
        raise DomainError("probabilities have a negative entry beyond tolerance")
    np.clip(probs, 0.0, None, out=probs)
    total = probs.sum()
    if abs(total - 1.0) > PROB_SUM_ATOL:
        raise DomainError(f"probabilities sum to {total!r}, expected 1")
    return probs / total


def _checked_probabilities(probs) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    _require_power_of_two(probs.size, "probability vector")
    if np.min(probs) < -NEGATIVE_CLAMP:
        raise DomainError("probabilities must be non-negative")
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > PROB_SUM_ATOL:
        raise DomainError(f"probabilities sum to {total!r}, expected 1")
    return probs / total


def sample_counts(probs, shots: int, seed: int) -> CountsHistogram:
    """One multinomial draw of ``shots`` outcomes; deterministic per seed."""
    probs = _checked_probabilities(probs)
    if shots < 1:
        raise DomainError("shots must be a positive integer")
    counts = generator(seed).multinomial(int(shots), probs)
    return CountsHistogram.from_vector(counts, int(np.log2(probs.size)))


def _merged_trajectory_counts(probs, n_qubits, lam, seed, start, stop):
    dim = probs.size
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    qubit_weights = (1 << np.arange(n_qubits)).astype(np.int64)
    flip_low = 1.0 - 0.75 * lam  # below: identity insertion
    flip_high = 1.0 - 0.25 * lam  # between: X or Y (bit flip); above: Z
    totals = np.zeros(dim, dtype=np.int64)
    position = start
    while position < stop:
        count = min(_TRAJECTORY_CHUNK, stop - position)
        gen = generator_at(seed, position * (n_qubits + 1))
        uniforms = gen.random((count, n_qubits + 1))
        outcomes = np.searchsorted(cdf, uniforms[:, 0], side="right")
        flips = (uniforms[:, 1:] >= flip_low) & (uniforms[:, 1:] < flip_high)
        masks = flips.astype(np.int64) @ qubit_weights
        totals += np.bincount(outcomes ^ masks, minlength=dim)
        position += count
    return totals


def trajectory_shard(state: StateVector, lam: float, seed: int, start: int, stop: int) -> np.ndarray:
    """Counts for trajectory shots ``start..stop`` of the stream keyed by ``seed``.

    Shot ``i`` consumes uniforms ``i*(n+1) .. (i+1)*(n+1)`` of the Philox
    stream, so shards of a run can be computed independently (in any split)
    and merged by addition into the exact histogram of the full run.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    if start < 0 or stop < start:
        raise DomainError("invalid shard range")
    probs = measure_probabilities(state)
    return _merged_trajectory_counts(probs, state.n_qubits, lam, seed, start, stop)


def sample_counts_trajectories(state: StateVector, lam: float, shots: int, seed: int) -> CountsHistogram:
    """Monte Carlo per-qubit depolarizing noise, one Pauli layer per shot.

    For every shot and qubit, X, Y, or Z is inserted with probability
    ``lam/4`` each (no-op with ``1 - 3 lam/4``) before a single basis
    measurement.  Z insertions and Pauli phases do not change basis-state
    probabilities, so only X/Y insertions act, as index bit-flips.
    """
    if shots < 1:
        raise DomainError("shots must be a positive integer")
    totals = trajectory_shard(state, lam, seed, 0, int(shots))
    return CountsHistogram.from_vector(totals, state.n_qubits)


# ---------------------------------------------------------------------------
# exact noisy probabilities (diagonal algebra of the channels above)


def global_noisy_probabilities(probs, lam: float) -> np.ndarray:
    """Diagonal action of the global channel: ``(1-lam) p + lam / 2^n``."""
    probs = _checked_probabilities(probs)
    return (1.0 - lam) * probs + lam / probs.size


def per_qubit_noisy_probabilities(probs, lam: float) -> np.ndarray:
    """Diagonal action of the per-qubit tensor-product channel.

    Each single-qubit channel mixes the distribution with its bit-flipped
    image: ``p -> (1 - lam/2) p + (lam/2) p[flip q]``.
    """
    probs = _checked_probabilities(probs)
    n = int(np.log2(probs.size))
    out = probs.reshape((2,) * n)
    for axis in range(n):
        out = (1.0 - lam / 2.0) * out + (lam / 2.0) * np.flip(out, axis=axis)
    return out.reshape(-1)


def exact_noisy_probabilities(state: StateVector, noise: NoiseSpec | None) -> np.ndarray:
    """Exact measurement probabilities of ``state`` after optional noise.

    Exact channel evolution carries density-matrix semantics and is refused
    above :data:`DENSITY_MAX_QUBITS`; use trajectories beyond that.  A
    ``TRAJECTORIES`` mode spec cannot produce exact probabilities.
    """
    probs = measure_probabilities(state)
    if noise is None or noise.lam == 0.0:
        return probs
    if noise.mode is NoiseMode.TRAJECTORIES:
        raise DomainError("trajectory noise requires sampled shots, not exact probabilities")
    if state.n_qubits > DENSITY_MAX_QUBITS:
        raise CapacityError(
            state.n_qubits, DENSITY_MAX_QUBITS, what="exact-noise qubits"
        )
    if noise.mode is NoiseMode.GLOBAL:
        return global_noisy_probabilities(probs, noise.lam)
    return per_qubit_noisy_probabilities(probs, noise.lam)
