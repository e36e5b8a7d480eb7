"""Registry of the shipped encoding methods and the encode/retrieve API.

Nine methods are registered: four grayscale (frqi, neqr, ifrqi, qualpi),
four RGB (frqci, mcqi, ncqi, qrci), and one multidimensional (mfrqi).
Every descriptor carries ``variant="geqie-spec-v1"``: the parameterizations
are fixed by this package, and published variants of the same method names
may differ in angle sets or bit layouts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..metrics import MetricPair, image_metrics
from ..model import EncodingModel, ImageArray, assemble_state, position_qubits
from ..simcore import (
    CountsHistogram,
    NoiseMode,
    NoiseSpec,
    StateVector,
    exact_noisy_probabilities,
    measure_probabilities,
    sample_counts,
    sample_counts_trajectories,
)
from . import grayscale, rgb, volumetric

VARIANT = "geqie-spec-v1"

GRAYSCALE = "grayscale"
RGB = "rgb"
MULTIDIM = "multidim"


@dataclass(frozen=True)
class MethodDescriptor:
    """Static registry entry for one encoding method."""

    name: str
    family: str
    channels: int
    value_qubits: int
    extra_qubits: int = 0
    exact_under_ideal: bool = False
    variant: str = VARIANT
    options: tuple = ()

    def budget(self, dims, **options) -> int:
        """Total qubits = value + auxiliary + position registers."""
        value, extra = _REGISTRY[self.name].registers(**options)
        return value + extra + position_qubits(dims)

    def build(self, dims, **options) -> EncodingModel:
        return _REGISTRY[self.name].build(dims, **options)


class _Entry:
    def __init__(self, descriptor_args, build, registers):
        self.descriptor_args = descriptor_args
        self.build = build
        self.registers = registers


def _fixed_registers(value, extra=0):
    def registers(**options):
        if options:
            raise DomainError(f"unsupported options: {sorted(options)}")
        return value, extra

    return registers


def _ncqi_registers(q: int = rgb.NCQI_DEFAULT_DEPTH):
    return 3 * int(q), 0


_REGISTRY = {
    "frqi": _Entry(dict(family=GRAYSCALE, channels=1, value_qubits=1),
                   grayscale.build_frqi, _fixed_registers(1)),
    "neqr": _Entry(dict(family=GRAYSCALE, channels=1, value_qubits=8,
                        exact_under_ideal=True),
                   grayscale.build_neqr, _fixed_registers(8)),
    "ifrqi": _Entry(dict(family=GRAYSCALE, channels=1, value_qubits=4),
                    grayscale.build_ifrqi, _fixed_registers(4)),
    "qualpi": _Entry(dict(family=GRAYSCALE, channels=1, value_qubits=8,
                          exact_under_ideal=True),
                     grayscale.build_qualpi, _fixed_registers(8)),
    "frqci": _Entry(dict(family=RGB, channels=3, value_qubits=1),
                    rgb.build_frqci, _fixed_registers(1)),
    "mcqi": _Entry(dict(family=RGB, channels=3, value_qubits=3),
                   rgb.build_mcqi, _fixed_registers(3)),
    "ncqi": _Entry(dict(family=RGB, channels=3,
                        value_qubits=3 * rgb.NCQI_DEFAULT_DEPTH,
                        exact_under_ideal=True, options=("q",)),
                   rgb.build_ncqi, _ncqi_registers),
    "qrci": _Entry(dict(family=RGB, channels=3, value_qubits=3, extra_qubits=3,
                        exact_under_ideal=True),
                   rgb.build_qrci, _fixed_registers(3, 3)),
    "mfrqi": _Entry(dict(family=MULTIDIM, channels=1, value_qubits=1),
                    volumetric.build_mfrqi, _fixed_registers(1)),
}

METHOD_NAMES = tuple(_REGISTRY)


def registry_list() -> list:
    """Descriptors for every shipped method, in stable registry order."""
    return [lookup(name) for name in METHOD_NAMES]


def lookup(name: str) -> MethodDescriptor:
    try:
        entry = _REGISTRY[name]
    except KeyError:
        raise DomainError(
            f"unknown encoding method {name!r}; available: {', '.join(METHOD_NAMES)}"
        ) from None
    return MethodDescriptor(name=name, **entry.descriptor_args)


def build_model(name: str, dims, **options) -> EncodingModel:
    return lookup(name).build(dims, **options)


def qubit_budget(name: str, dims, **options) -> int:
    return lookup(name).budget(dims, **options)


def _check_family(descriptor: MethodDescriptor, image: ImageArray) -> None:
    if image.channels != descriptor.channels:
        raise DomainError(
            f"{descriptor.name} expects {descriptor.channels}-channel images, "
            f"got {image.channels}"
        )
    if descriptor.family in (GRAYSCALE, RGB) and len(image.dims) != 2:
        raise DomainError(f"{descriptor.name} encodes 2-D images, got dims {image.dims}")


def encode(name: str, image: ImageArray, max_qubits: int | None = None,
           **options) -> StateVector:
    """Encode an image with the named method (family and budget checked)."""
    descriptor = lookup(name)
    _check_family(descriptor, image)
    model = descriptor.build(image.dims, **options)
    return assemble_state(model, image, max_qubits=max_qubits)


def _as_weights(counts, n_qubits: int) -> np.ndarray:
    if isinstance(counts, CountsHistogram):
        if counts.n_qubits != n_qubits:
            raise DomainError(
                f"histogram has {counts.n_qubits} qubits, method needs {n_qubits}"
            )
        return counts.to_weights()
    weights = np.asarray(counts, dtype=np.float64)
    if weights.shape != (1 << n_qubits,):
        raise DomainError(
            f"weight vector has length {weights.size}, expected {1 << n_qubits}"
        )
    if np.min(weights) < 0:
        raise DomainError("weights must be non-negative")
    return weights


def retrieve(name: str, counts, dims, **options) -> ImageArray:
    """Decode a histogram (or a dense weight/probability vector) to an image.

    Positions that received no shots decode to value 0.
    """
    model = build_model(name, dims, **options)
    weights = _as_weights(counts, model.total_qubits)
    return model.retrieve(weights, tuple(dims))


def measurement_weights(state: StateVector, shots: int,
                        noise: NoiseSpec | None = None, seed: int = 0) -> np.ndarray:
    """Measurement weights of a state: sampled counts, or exact probabilities
    for the ``shots == 0`` sentinel, under the requested noise."""
    if shots == 0:
        return exact_noisy_probabilities(state, noise)
    if noise is None or noise.lam == 0.0:
        return sample_counts(measure_probabilities(state), shots, seed).to_weights()
    if noise.mode is NoiseMode.TRAJECTORIES:
        return sample_counts_trajectories(state, noise.lam, shots, seed).to_weights()
    return sample_counts(exact_noisy_probabilities(state, noise), shots, seed).to_weights()


def roundtrip(name: str, image: ImageArray, shots: int,
              noise: NoiseSpec | None = None, seed: int = 0,
              max_qubits: int | None = None, **options):
    """encode -> (noise) -> sample -> retrieve -> metrics.

    ``shots == 0`` is the exact-probability sentinel: retrieval runs on the
    noiseless or exactly-noised distribution instead of sampled counts.
    Returns ``(retrieved_image, MetricPair)``.
    """
    descriptor = lookup(name)
    _check_family(descriptor, image)
    model = descriptor.build(image.dims, **options)
    state = assemble_state(model, image, max_qubits=max_qubits)
    weights = measurement_weights(state, shots, noise=noise, seed=seed)
    retrieved = model.retrieve(weights, tuple(model.dims))
    return retrieved, image_metrics(image, retrieved)


__all__ = [
    "MethodDescriptor",
    "METHOD_NAMES",
    "registry_list",
    "lookup",
    "build_model",
    "qubit_budget",
    "encode",
    "retrieve",
    "measurement_weights",
    "roundtrip",
    "MetricPair",
]
