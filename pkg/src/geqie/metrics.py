"""Image-similarity metrics: Pearson correlation, MSE, and PSNR.

Image comparisons quantize both sides to 8 bits first, which keeps the
mean squared error on the 0..255 scale the PSNR peak value refers to.
Perfect retrieval (zero MSE) reports PSNR as +infinity; plot and CSV
exports cap the displayed value at 60 dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

PSNR_DISPLAY_CAP_DB = 60.0


@dataclass(frozen=True)
class MetricPair:
    """PCC plus PSNR (dB, may be +inf) for one original/retrieved pair."""

    pcc: float
    psnr_db: float


def _paired(x, y):
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    return x, y


def pcc(x, y) -> float:
    """Pearson's correlation of two flattened vectors.

    Returns 0.0 when either vector has zero variance: a constant retrieved
    image carries no recoverable correlation, and the total-noise benchmark
    cells must still hold a finite number.
    """
    x, y = _paired(x, y)
    if x.size < 2:
        raise DomainError("correlation needs at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    denom_sq = float(np.dot(dx, dx)) * float(np.dot(dy, dy))
    if denom_sq <= 0.0:
        return 0.0
    return float(np.dot(dx, dy) / math.sqrt(denom_sq))


def mse(x, y) -> float:
    """Mean squared error of vectors already on the 0..255 scale."""
    x, y = _paired(x, y)
    if x.size == 0:
        raise DomainError("mse needs at least one sample")
    diff = x - y
    return float(np.mean(diff * diff))


def psnr(x, y) -> float:
    """20 log10(255 / sqrt(MSE)); +inf for a perfect match."""
    error = mse(x, y)
    if error == 0.0:
        return math.inf
    return 20.0 * math.log10(255.0 / math.sqrt(error))


def psnr_display_cap(value: float) -> float:
    """Cap PSNR for plots/CSV at 60 dB; +inf maps to the cap."""
    return min(float(value), PSNR_DISPLAY_CAP_DB)


def quantize_u8(values) -> np.ndarray:
    """Round [0, 1] values to the 0..255 integer grid."""
    return np.rint(np.asarray(values, dtype=np.float64) * 255.0)


def image_metrics(original, retrieved) -> MetricPair:
    """PCC and PSNR between two images, both quantized to 8 bits first."""
    a = quantize_u8(original.values)
    b = quantize_u8(retrieved.values)
    if a.shape != b.shape:
        raise DomainError(f"image shape mismatch: {a.shape} vs {b.shape}")
    return MetricPair(pcc=pcc(a, b), psnr_db=psnr(a, b))
