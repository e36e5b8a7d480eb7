import numpy as np
import pytest
from numpy.testing import assert_allclose
from sklearn.base import clone
from sklearn.pipeline import Pipeline

from geqie.errors import DomainError
from geqie.estimator import QuantumImageCodec


def image_rows(seed, n, features):
    gen = np.random.default_rng(seed)
    return gen.integers(0, 256, size=(n, features)) / 255.0


def test_get_params_round_trips_through_clone():
    codec = QuantumImageCodec(method="neqr", dims=(2, 2), shots=128, seed=3)
    params = codec.get_params()
    assert params["method"] == "neqr"
    assert params["shots"] == 128
    duplicate = clone(codec)
    assert duplicate.get_params() == params


def test_set_params_supports_grid_search_style_updates():
    codec = QuantumImageCodec()
    codec.set_params(method="mcqi", noise_lambda=0.25)
    assert codec.method == "mcqi"
    assert codec.noise_lambda == 0.25


def test_fit_validates_feature_count_and_budget():
    codec = QuantumImageCodec(method="frqi", dims=(4, 4))
    with pytest.raises(DomainError):
        codec.fit(image_rows(0, 2, 15))
    over = QuantumImageCodec(method="neqr", dims=(8, 8))
    with pytest.raises(DomainError):
        over.fit(image_rows(0, 1, 64))
    with pytest.raises(DomainError):
        QuantumImageCodec(method="frqi", dims=(2, 2)).fit([[0.5, 0.2, 1.4, 0.0]])


def test_fit_sets_the_learned_attributes():
    codec = QuantumImageCodec(method="mcqi", dims=(2, 2)).fit(image_rows(1, 3, 12))
    assert codec.n_qubits_ == 5
    assert codec.channels_ == 3
    assert codec.n_features_in_ == 12


def test_transform_yields_normalized_amplitude_rows():
    X = image_rows(2, 3, 16)
    codec = QuantumImageCodec(method="frqi", dims=(4, 4)).fit(X)
    amplitudes = codec.transform(X)
    assert amplitudes.shape == (3, 32)
    assert_allclose(np.sum(np.abs(amplitudes) ** 2, axis=1), 1.0, atol=1e-10)


def test_exact_simulation_inverts_through_inverse_transform():
    X = image_rows(3, 4, 16)
    codec = QuantumImageCodec(method="frqi", dims=(4, 4), shots=0).fit(X)
    weights = codec.simulate(X)
    back = codec.inverse_transform(weights)
    assert back.shape == X.shape
    assert np.max(np.abs(back - X)) <= 1e-9


def test_simulate_is_deterministic_per_seed():
    X = image_rows(4, 2, 16)
    codec = QuantumImageCodec(method="frqi", dims=(4, 4), shots=2048, seed=7).fit(X)
    assert np.array_equal(codec.simulate(X), codec.simulate(X))
    other = QuantumImageCodec(method="frqi", dims=(4, 4), shots=2048, seed=8).fit(X)
    assert not np.array_equal(codec.simulate(X), other.simulate(X))


def test_score_reflects_noise_level():
    X = image_rows(5, 4, 16)
    clean = QuantumImageCodec(method="frqi", dims=(4, 4), shots=0).fit(X)
    assert clean.score(X) >= 0.99
    noisy = QuantumImageCodec(method="frqi", dims=(4, 4), shots=4096,
                              noise_lambda=1.0, seed=6).fit(X)
    assert noisy.score(X) <= 0.5


def test_codec_composes_in_a_sklearn_pipeline():
    X = image_rows(6, 2, 16)
    pipeline = Pipeline([
        ("codec", QuantumImageCodec(method="frqi", dims=(4, 4), shots=0)),
    ])
    amplitudes = pipeline.fit_transform(X)
    assert amplitudes.shape == (2, 32)


def test_rgb_codec_roundtrip():
    X = image_rows(7, 2, 12)
    codec = QuantumImageCodec(method="mcqi", dims=(2, 2), shots=0).fit(X)
    back = codec.inverse_transform(codec.simulate(X))
    assert np.max(np.abs(back - X)) <= 1e-9
