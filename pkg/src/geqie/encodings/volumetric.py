"""Multidimensional encoding: mfrqi.

The angle scheme of FRQI carries over unchanged; only the position index
generalizes to a row-major flattening over d padded axes, so voxel grids
(or any d-dimensional [0, 1] field) encode with one value qubit.
"""

from __future__ import annotations

from ..model import EncodingModel
from ._common import build_angle_model


def build_mfrqi(dims) -> EncodingModel:
    return build_angle_model("mfrqi", dims)
