"""Scikit-learn style front end for the encoding round trip.

The codec is a transformer over batches of flattened images: ``transform``
encodes each row into statevector amplitudes, ``simulate`` runs the noisy
measurement and returns per-basis-state weights, and ``inverse_transform``
decodes weights back into images.  Because it implements ``get_params`` /
``set_params`` via ``BaseEstimator``, it clones and grid-searches like any
other sklearn component.

>>> codec = QuantumImageCodec(method="frqi", dims=(4, 4), shots=0)
>>> X = np.random.default_rng(0).random((3, 16))
>>> codec.fit(X).score(X) > 0.99
True
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import encodings
from .errors import DomainError
from .model import ImageArray
from .rng import derive_seed
from .simcore import NoiseMode, NoiseSpec


def _as_image(row, dims, channels) -> ImageArray:
    values = np.asarray(row, dtype=np.float64).reshape(tuple(dims) + (channels,))
    return ImageArray(values)


class QuantumImageCodec(BaseEstimator, TransformerMixin):
    """Encode/retrieve images through a simulated quantum measurement.

    Parameters
    ----------
    method : str
        One of the registered encoding names (see ``encodings.METHOD_NAMES``).
    dims : tuple
        Spatial extents of each image; rows of ``X`` are the row-major
        flattening of ``dims + (channels,)``.
    shots : int
        Measurement shots per image; 0 retrieves from exact probabilities.
    noise_lambda : float
        Depolarizing error probability in [0, 1].
    noise_mode : str
        "global", "per-qubit", or "trajectories".
    seed : int
        Master seed; each row samples from a derived sub-seed.
    max_qubits : int
        Register budget guard checked in ``fit``.
    """

    def __init__(self, method="frqi", dims=(4, 4), shots=16384,
                 noise_lambda=0.0, noise_mode="trajectories", seed=0,
                 max_qubits=12):
        self.method = method
        self.dims = dims
        self.shots = shots
        self.noise_lambda = noise_lambda
        self.noise_mode = noise_mode
        self.seed = seed
        self.max_qubits = max_qubits

    # -- fitting ------------------------------------------------------------

    def fit(self, X, y=None):
        descriptor = encodings.lookup(self.method)
        dims = tuple(int(d) for d in self.dims)
        budget = descriptor.budget(dims)
        if budget > self.max_qubits:
            raise DomainError(
                f"{self.method} on {dims} needs {budget} qubits, "
                f"max_qubits is {self.max_qubits}"
            )
        X = check_array(X, dtype=np.float64)
        expected = int(np.prod(dims)) * descriptor.channels
        if X.shape[1] != expected:
            raise DomainError(
                f"rows must have {expected} features for {self.method} on "
                f"{dims}, got {X.shape[1]}"
            )
        if X.min() < 0.0 or X.max() > 1.0:
            raise DomainError("pixel values must lie in [0, 1]")
        self.dims_ = dims
        self.channels_ = descriptor.channels
        self.n_qubits_ = budget
        self.n_features_in_ = X.shape[1]
        return self

    # -- transforms ---------------------------------------------------------

    def transform(self, X):
        """Rows of statevector amplitudes, shape (n_samples, 2^n_qubits)."""
        check_is_fitted(self, "dims_")
        X = check_array(X, dtype=np.float64)
        out = np.empty((X.shape[0], 1 << self.n_qubits_), dtype=np.complex128)
        for index, row in enumerate(X):
            image = _as_image(row, self.dims_, self.channels_)
            out[index] = encodings.encode(
                self.method, image, max_qubits=self.max_qubits
            ).amplitudes
        return out

    def simulate(self, X):
        """Measurement weights per row: counts, or probabilities if shots=0."""
        check_is_fitted(self, "dims_")
        X = check_array(X, dtype=np.float64)
        noise = self._noise_spec()
        out = np.empty((X.shape[0], 1 << self.n_qubits_))
        for index, row in enumerate(X):
            image = _as_image(row, self.dims_, self.channels_)
            state = encodings.encode(self.method, image, max_qubits=self.max_qubits)
            out[index] = encodings.measurement_weights(
                state, self.shots, noise=noise,
                seed=derive_seed(self.seed, "row", index),
            )
        return out

    def inverse_transform(self, W):
        """Decode weight rows (counts or probabilities) back into images."""
        check_is_fitted(self, "dims_")
        W = check_array(W, dtype=np.float64)
        out = np.empty((W.shape[0], self.n_features_in_))
        for index, row in enumerate(W):
            image = encodings.retrieve(self.method, row, self.dims_)
            out[index] = image.values.reshape(-1)
        return out

    def score(self, X, y=None):
        """Mean round-trip correlation over the rows of ``X``."""
        check_is_fitted(self, "dims_")
        X = check_array(X, dtype=np.float64)
        noise = self._noise_spec()
        scores = []
        for index, row in enumerate(X):
            image = _as_image(row, self.dims_, self.channels_)
            _, pair = encodings.roundtrip(
                self.method, image, self.shots, noise=noise,
                seed=derive_seed(self.seed, "row", index),
                max_qubits=self.max_qubits,
            )
            scores.append(pair.pcc)
        return float(np.mean(scores))

    def _noise_spec(self):
        if self.noise_lambda == 0.0:
            return None
        return NoiseSpec(self.noise_lambda, NoiseMode.parse(self.noise_mode))
