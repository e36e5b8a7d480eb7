"""Grayscale encodings: frqi, neqr, ifrqi, qualpi."""

from __future__ import annotations

import numpy as np

from ..model import EncodingModel, ImageArray
from ._common import (
    build_angle_model,
    build_basis_model,
    conditional_excited_probability,
    in_range,
    in_range_positions,
    make_position_map,
    quantize,
    quantized_image,
)

#: IFRQI bit-pair angles; the excited-state probabilities sin^2 are
#: {0, 1/4, 3/4, 1}, four maximally separated readout levels.
IFRQI_ANGLES = (0.0, np.pi / 6.0, np.pi / 3.0, np.pi / 2.0)
IFRQI_THRESHOLDS = (0.125, 0.5, 0.875)


def build_frqi(dims) -> EncodingModel:
    return build_angle_model("frqi", dims)


def build_neqr(dims) -> EncodingModel:
    return build_basis_model("neqr", dims, bits=8)


def build_qualpi(dims) -> EncodingModel:
    """Log-polar raster encoding: axis 0 is radial, axis 1 angular.

    The register layout and value encoding coincide with an 8-bit basis
    model; only the coordinate semantics differ, so a square test grid
    exercises it as a (rho, theta) raster.
    """
    return build_basis_model("qualpi", dims, bits=8)


def build_ifrqi(dims) -> EncodingModel:
    """Bit-pair angle encoding: 8-bit intensity as four 2-bit pairs.

    Value qubit j carries the pair (bit 2j+1, bit 2j) mapped onto
    :data:`IFRQI_ANGLES`; the most significant pair rides the most
    significant value qubit.  Each qubit decodes independently by a
    nearest-level decision on its excited-state probability.
    """
    dims = tuple(int(d) for d in dims)
    position = make_position_map(dims)
    cos_amp = np.cos(IFRQI_ANGLES)
    sin_amp = np.sin(IFRQI_ANGLES)

    def delta(_k, _l, coord, pixel):
        out = np.zeros(16, dtype=np.complex128)
        if not in_range(coord, dims):
            return out
        level = int(quantize(pixel[0], 256))
        pairs = [(level >> (2 * j)) & 3 for j in range(4)]
        for index in range(16):
            amp = 1.0
            for j in range(4):
                bit = (index >> j) & 1
                amp *= sin_amp[pairs[j]] if bit else cos_amp[pairs[j]]
            out[index] = amp
        return out

    def xi(_k, _l, coord):
        return position(coord)

    def retrieve(weights, out_dims):
        table = np.asarray(weights, dtype=np.float64).reshape(2, 2, 2, 2, -1)
        keep = in_range_positions(out_dims)
        levels = np.zeros(keep.size, dtype=np.int64)
        for j in range(4):
            axis_order = [3 - j] + [a for a in range(4) if a != 3 - j]
            marginal = table.transpose(axis_order + [4]).reshape(2, -1, table.shape[-1])
            zero_w = marginal[0].sum(axis=0)[keep]
            one_w = marginal[1].sum(axis=0)[keep]
            p_one = conditional_excited_probability(zero_w, one_w)
            pair = np.searchsorted(IFRQI_THRESHOLDS, p_one, side="right")
            levels |= pair.astype(np.int64) << (2 * j)
        values = levels.astype(np.float64) / 255.0
        return ImageArray(values.reshape(tuple(out_dims) + (1,)))

    return EncodingModel(
        name="ifrqi", dims=dims, channels=1, value_qubits=4,
        delta=delta, xi=xi, retrieve=retrieve,
        canonical=lambda image: quantized_image(image, 256),
        verify_tolerance=0.0,
    )
