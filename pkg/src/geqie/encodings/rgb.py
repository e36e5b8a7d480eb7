"""RGB encodings: frqci, mcqi, ncqi, qrci."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..model import EncodingModel, ImageArray, padded_extents
from ._common import (
    angle_from_value,
    conditional_excited_probability,
    in_range,
    in_range_positions,
    make_position_map,
    quantize,
    value_from_excited_probability,
)

NCQI_DEFAULT_DEPTH = 3

#: FRQCI channel weights: theta = (pi/2) (4R + 2G + B) / 7.
FRQCI_WEIGHTS = (4, 2, 1)
_FRQCI_MAX = 7 * 255


def _frqci_sum_to_triple(total: int) -> tuple:
    """Greedy most-significant-first split of 4R + 2G + B = total (8-bit)."""
    red = min(255, total // 4)
    rest = total - 4 * red
    green = min(255, rest // 2)
    blue = rest - 2 * green
    return red, green, blue


def _frqci_canonical(image: ImageArray) -> ImageArray:
    rgb8 = quantize(image.values, 256)
    totals = rgb8[..., 0] * 4 + rgb8[..., 1] * 2 + rgb8[..., 2]
    out = np.empty_like(image.values)
    flat = totals.reshape(-1)
    triples = np.array([_frqci_sum_to_triple(int(t)) for t in flat], dtype=np.float64)
    out.reshape(-1, 3)[:] = triples / 255.0
    return ImageArray(out)


def build_frqci(dims) -> EncodingModel:
    """One angle qubit packing all three channels with descending weights.

    The packing is deliberately tight: the blue contribution changes the
    angle by at most 1/1785 of the range, so it needs far more shots than
    red to survive sampling error.
    """
    dims = tuple(int(d) for d in dims)
    position = make_position_map(dims)

    def delta(_k, _l, coord, pixel):
        if not in_range(coord, dims):
            return np.zeros(2, dtype=np.complex128)
        # pack on the 8-bit grid so the rounding decode is exact under
        # exact probabilities (the loss is the packing itself)
        rgb8 = quantize(np.asarray(pixel), 256)
        packed = float(4 * rgb8[0] + 2 * rgb8[1] + rgb8[2]) / _FRQCI_MAX
        theta = angle_from_value(packed)
        return np.array([np.cos(theta), np.sin(theta)], dtype=np.complex128)

    def xi(_k, _l, coord):
        return position(coord)

    def retrieve(weights, out_dims):
        rows = np.asarray(weights, dtype=np.float64).reshape(2, -1)
        keep = in_range_positions(out_dims)
        p_one = conditional_excited_probability(rows[0, keep], rows[1, keep])
        packed = value_from_excited_probability(p_one)
        totals = np.rint(np.clip(packed, 0.0, 1.0) * _FRQCI_MAX).astype(np.int64)
        triples = np.array([_frqci_sum_to_triple(int(t)) for t in totals],
                           dtype=np.float64) / 255.0
        return ImageArray(triples.reshape(tuple(out_dims) + (3,)))

    return EncodingModel(
        name="frqci", dims=dims, channels=3, value_qubits=1,
        delta=delta, xi=xi, retrieve=retrieve,
        canonical=_frqci_canonical,
        verify_tolerance=0.0,
    )


def build_mcqi(dims) -> EncodingModel:
    """Channel-selector encoding: |cc> in {00->R, 01->G, 10->B} (11 unused),
    each paired with one angle qubit at theta_c = (pi/2) * channel value."""
    dims = tuple(int(d) for d in dims)
    position = make_position_map(dims)
    inv_sqrt3 = 1.0 / np.sqrt(3.0)

    def delta(_k, _l, coord, pixel):
        out = np.zeros(8, dtype=np.complex128)
        if not in_range(coord, dims):
            return out
        for channel in range(3):
            theta = angle_from_value(pixel[channel])
            out[channel * 2] = inv_sqrt3 * np.cos(theta)
            out[channel * 2 + 1] = inv_sqrt3 * np.sin(theta)
        return out

    def xi(_k, _l, coord):
        return position(coord)

    def retrieve(weights, out_dims):
        table = np.asarray(weights, dtype=np.float64).reshape(4, 2, -1)
        keep = in_range_positions(out_dims)
        channels = []
        for channel in range(3):
            p_one = conditional_excited_probability(
                table[channel, 0, keep], table[channel, 1, keep]
            )
            channels.append(value_from_excited_probability(p_one))
        values = np.stack(channels, axis=-1)
        return ImageArray(values.reshape(tuple(out_dims) + (3,)))

    return EncodingModel(
        name="mcqi", dims=dims, channels=3, value_qubits=3,
        delta=delta, xi=xi, retrieve=retrieve,
        verify_tolerance=1e-9,
    )


def build_ncqi(dims, q: int = NCQI_DEFAULT_DEPTH) -> EncodingModel:
    """Concatenated q-bit basis encodings per channel (R most significant).

    The default q=3 keeps a 2x2 image at 11 qubits; q=8 is available when
    the simulation budget allows.
    """
    dims = tuple(int(d) for d in dims)
    q = int(q)
    if not 1 <= q <= 8:
        raise DomainError(f"ncqi bit depth must be in 1..8, got {q}")
    levels = 1 << q
    value_dim = levels ** 3
    position = make_position_map(dims)

    def delta(_k, _l, coord, pixel):
        out = np.zeros(value_dim, dtype=np.complex128)
        if in_range(coord, dims):
            r, g, b = (int(quantize(c, levels)) for c in pixel)
            out[(r << (2 * q)) | (g << q) | b] = 1.0
        return out

    def xi(_k, _l, coord):
        return position(coord)

    def retrieve(weights, out_dims):
        table = np.asarray(weights, dtype=np.float64).reshape(value_dim, -1)
        keep = in_range_positions(out_dims)
        votes = np.argmax(table[:, keep], axis=0)
        scale = float(levels - 1)
        values = np.stack([
            (votes >> (2 * q)) & (levels - 1),
            (votes >> q) & (levels - 1),
            votes & (levels - 1),
        ], axis=-1).astype(np.float64) / scale
        return ImageArray(values.reshape(tuple(out_dims) + (3,)))

    def canonical(image):
        return ImageArray(quantize(image.values, levels) / (levels - 1))

    return EncodingModel(
        name="ncqi", dims=dims, channels=3, value_qubits=3 * q,
        delta=delta, xi=xi, retrieve=retrieve,
        canonical=canonical,
        verify_tolerance=0.0,
    )


def build_qrci(dims) -> EncodingModel:
    """Bit-plane encoding: 8 additive layers, one per bit plane.

    Layer l stores the three channel bits of plane l as a basis state on the
    color qubits (R most significant) and tags it with l on a 3-qubit plane
    register; each layer's value state carries weight 1/sqrt(8) so the
    per-pixel contribution stays unit norm.  Channels are recomposed from
    per-(position, plane) majority votes.
    """
    dims = tuple(int(d) for d in dims)
    position = make_position_map(dims)
    pos_dim = int(np.prod(padded_extents(dims)))
    inv_sqrt_planes = 1.0 / np.sqrt(8.0)

    def delta(_k, layer, coord, pixel):
        out = np.zeros(8, dtype=np.complex128)
        if in_range(coord, dims):
            r, g, b = (int(quantize(c, 256)) for c in pixel)
            pattern = (((r >> layer) & 1) << 2) | (((g >> layer) & 1) << 1) | ((b >> layer) & 1)
            out[pattern] = inv_sqrt_planes
        return out

    def xi(_k, layer, coord):
        return layer * pos_dim + position(coord)

    def retrieve(weights, out_dims):
        table = np.asarray(weights, dtype=np.float64).reshape(8, 8, -1)
        keep = in_range_positions(out_dims)
        red = np.zeros(keep.size, dtype=np.int64)
        green = np.zeros(keep.size, dtype=np.int64)
        blue = np.zeros(keep.size, dtype=np.int64)
        for layer in range(8):
            votes = np.argmax(table[:, layer, :][:, keep], axis=0)
            red |= ((votes >> 2) & 1) << layer
            green |= ((votes >> 1) & 1) << layer
            blue |= (votes & 1) << layer
        values = np.stack([red, green, blue], axis=-1).astype(np.float64) / 255.0
        return ImageArray(values.reshape(tuple(out_dims) + (3,)))

    def canonical(image):
        return ImageArray(quantize(image.values, 256) / 255.0)

    return EncodingModel(
        name="qrci", dims=dims, channels=3, value_qubits=3,
        delta=delta, xi=xi, retrieve=retrieve,
        layers=8, extra_qubits=3,
        canonical=canonical,
        verify_tolerance=0.0,
    )
