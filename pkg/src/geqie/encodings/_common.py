"""Shared pieces of the concrete method definitions."""

from __future__ import annotations

import itertools

import numpy as np

from ..model import EncodingModel, ImageArray, padded_extents


def make_position_map(dims):
    """Row-major coordinate -> index map over the padded extents."""
    padded = padded_extents(dims)
    strides = []
    acc = 1
    for extent in reversed(padded):
        strides.append(acc)
        acc *= extent
    strides = tuple(reversed(strides))

    def position(coord) -> int:
        return sum(int(c) * s for c, s in zip(coord, strides))

    return position


def in_range(coord, dims) -> bool:
    return all(0 <= c < d for c, d in zip(coord, dims))


def in_range_positions(dims) -> np.ndarray:
    """Padded-grid indices of the true coordinates, in row-major coord order."""
    position = make_position_map(dims)
    coords = itertools.product(*(range(d) for d in dims))
    return np.fromiter((position(c) for c in coords), dtype=np.int64,
                       count=int(np.prod(dims)))


def angle_from_value(value: float) -> float:
    """FRQI-style angle: theta = (pi/2) * value for value in [0, 1]."""
    return 0.5 * np.pi * float(value)


def value_from_excited_probability(p_one: np.ndarray) -> np.ndarray:
    """Invert sin^2(theta) with theta = (pi/2) g: g = (2/pi) asin(sqrt(p1))."""
    return (2.0 / np.pi) * np.arcsin(np.sqrt(np.clip(p_one, 0.0, 1.0)))


def conditional_excited_probability(zero_w, one_w):
    """P(1) per position from |0>/|1> weight rows; zero-shot positions give 0."""
    total = zero_w + one_w
    out = np.zeros_like(total)
    np.divide(one_w, total, out=out, where=total > 0)
    return out


def quantize(values: np.ndarray, levels: int) -> np.ndarray:
    """Round [0, 1] values onto the integer grid {0, ..., levels - 1}."""
    return np.rint(np.asarray(values) * (levels - 1)).astype(np.int64)


def quantized_image(image: ImageArray, levels: int) -> ImageArray:
    return ImageArray(quantize(image.values, levels) / (levels - 1),
                      image.bit_depth)


def build_angle_model(name: str, dims) -> EncodingModel:
    """Single angle qubit per position: cos/sin of (pi/2) * value.

    Shared by FRQI (2-D grayscale) and MFRQI (d-dimensional grids); the
    decode inverts the excited-state probability per position.
    """
    dims = tuple(int(d) for d in dims)
    position = make_position_map(dims)

    def delta(_k, _l, coord, pixel):
        if not in_range(coord, dims):
            return np.zeros(2, dtype=np.complex128)
        theta = angle_from_value(pixel[0])
        return np.array([np.cos(theta), np.sin(theta)], dtype=np.complex128)

    def xi(_k, _l, coord):
        return position(coord)

    def retrieve(weights, out_dims):
        rows = np.asarray(weights, dtype=np.float64).reshape(2, -1)
        keep = in_range_positions(out_dims)
        p_one = conditional_excited_probability(rows[0, keep], rows[1, keep])
        values = value_from_excited_probability(p_one)
        return ImageArray(values.reshape(tuple(out_dims) + (1,)))

    return EncodingModel(
        name=name, dims=dims, channels=1, value_qubits=1,
        delta=delta, xi=xi, retrieve=retrieve,
        verify_tolerance=1e-9,
    )


def build_basis_model(name: str, dims, bits: int = 8) -> EncodingModel:
    """Basis-encoded intensity: value register holds |round((2^bits-1) g)>.

    Decoding takes the per-position majority vote over observed value
    bitstrings (ties resolve to the lowest value, which also sends
    zero-shot positions to 0).
    """
    dims = tuple(int(d) for d in dims)
    levels = 1 << bits
    position = make_position_map(dims)

    def delta(_k, _l, coord, pixel):
        out = np.zeros(levels, dtype=np.complex128)
        if in_range(coord, dims):
            out[int(quantize(pixel[0], levels))] = 1.0
        return out

    def xi(_k, _l, coord):
        return position(coord)

    def retrieve(weights, out_dims):
        table = np.asarray(weights, dtype=np.float64).reshape(levels, -1)
        keep = in_range_positions(out_dims)
        votes = np.argmax(table[:, keep], axis=0)
        values = votes.astype(np.float64) / (levels - 1)
        return ImageArray(values.reshape(tuple(out_dims) + (1,)))

    return EncodingModel(
        name=name, dims=dims, channels=1, value_qubits=bits,
        delta=delta, xi=xi, retrieve=retrieve,
        canonical=lambda image: quantized_image(image, levels),
        verify_tolerance=0.0,
    )
