"""Volumetric pipeline: point clouds, voxel grids, normalization, round trips.

Density grids are particle counts per voxel.  Before encoding they are
squashed into [0, 1) by one of six invertible normalizations of the form
``1 - base^(-x / s)``, with base e or 10 and scale ``s`` drawn from the
grid's mean, median, or the squared mean/median of its nonzero voxels
(the squared variants exist for high-resolution grids whose mass of empty
voxels drags the plain statistics toward zero).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .metrics import pcc
from .model import ImageArray
from .rng import derive_seed, generator
from . import encodings
from .simcore import measure_probabilities, sample_counts

_CLAMP_BELOW_ONE = 1e-12


class Base(enum.Enum):
    E = "e"
    TEN = "ten"


class Statistic(enum.Enum):
    MEAN = "mean"
    MEDIAN = "median"
    NONZERO_MEAN_SQUARED = "nonzero-mean-sq"
    NONZERO_MEDIAN_SQUARED = "nonzero-median-sq"


@dataclass(frozen=True)
class NormScheme:
    base: Base
    statistic: Statistic

    @property
    def key(self) -> str:
        return f"{self.base.value}-{self.statistic.value}"


#: The six shipped scheme combinations (base-10 squared variants are not).
SCHEMES = {
    scheme.key: scheme
    for scheme in (
        NormScheme(Base.E, Statistic.MEAN),
        NormScheme(Base.E, Statistic.MEDIAN),
        NormScheme(Base.TEN, Statistic.MEAN),
        NormScheme(Base.TEN, Statistic.MEDIAN),
        NormScheme(Base.E, Statistic.NONZERO_MEAN_SQUARED),
        NormScheme(Base.E, Statistic.NONZERO_MEDIAN_SQUARED),
    )
}


def scheme_by_name(name: str) -> NormScheme:
    try:
        return SCHEMES[name]
    except KeyError:
        raise DomainError(
            f"unknown normalization scheme {name!r}; available: {', '.join(SCHEMES)}"
        ) from None


@dataclass(frozen=True)
class NormalizationInfo:
    scheme: NormScheme
    scale: float


@dataclass(frozen=True)
class PointCloud:
    """Particle positions in box units; all coordinates in [0, box_size]."""

    points: np.ndarray
    box_size: float

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise DomainError(f"points must have shape (N, 3), got {pts.shape}")
        if pts.shape[0] == 0:
            raise DomainError("point cloud is empty")
        if self.box_size <= 0:
            raise DomainError(f"box size must be positive, got {self.box_size}")
        if np.min(pts) < 0 or np.max(pts) > self.box_size:
            raise DomainError("coordinates fall outside [0, box_size]")

    @property
    def count(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class VoxelGrid:
    """Cubic density grid; raw grids hold counts, normalized grids [0, 1]."""

    densities: np.ndarray
    normalization: NormalizationInfo | None = None

    def __post_init__(self):
        dens = np.ascontiguousarray(self.densities, dtype=np.float64)
        object.__setattr__(self, "densities", dens)
        if dens.ndim != 3 or len(set(dens.shape)) != 1:
            raise DomainError(f"expected a cubic 3-D grid, got shape {dens.shape}")
        if np.min(dens) < 0:
            raise DomainError("densities must be non-negative")
        if self.normalization is not None and np.max(dens) > 1.0:
            raise DomainError("normalized values must lie in [0, 1]")

    @property
    def resolution(self) -> int:
        return self.densities.shape[0]


def voxelize(cloud: PointCloud, resolution: int) -> VoxelGrid:
    """Count particles per voxel: ``floor(coord / box * resolution)``.

    A coordinate equal to the box size clamps into the last voxel, so the
    total count is conserved exactly.
    """
    resolution = int(resolution)
    if resolution < 2 or resolution & (resolution - 1):
        raise DomainError(f"resolution must be a power of two >= 2, got {resolution}")
    scaled = np.floor(cloud.points / cloud.box_size * resolution).astype(np.int64)
    np.clip(scaled, 0, resolution - 1, out=scaled)
    flat = (scaled[:, 0] * resolution + scaled[:, 1]) * resolution + scaled[:, 2]
    counts = np.bincount(flat, minlength=resolution ** 3).astype(np.float64)
    return VoxelGrid(counts.reshape(resolution, resolution, resolution))


def _lower_median(values: np.ndarray) -> float:
    """Median as the lower middle element (deterministic, no interpolation)."""
    ordered = np.sort(values.reshape(-1))
    return float(ordered[(ordered.size - 1) // 2])


def _scale(grid: VoxelGrid, scheme: NormScheme) -> float:
    dens = grid.densities
    if scheme.statistic is Statistic.MEAN:
        scale = float(dens.mean())
    elif scheme.statistic is Statistic.MEDIAN:
        scale = _lower_median(dens)
    else:
        nonzero = dens[dens > 0]
        if nonzero.size == 0:
            raise DomainError(
                f"degenerate scale: no nonzero voxels for statistic "
                f"{scheme.statistic.value}"
            )
        if scheme.statistic is Statistic.NONZERO_MEAN_SQUARED:
            scale = float(nonzero.mean()) ** 2
        else:
            scale = _lower_median(nonzero) ** 2
    if scale <= 0.0:
        raise DomainError(
            f"degenerate scale: statistic {scheme.statistic.value} is zero"
        )
    return scale


def normalize(grid: VoxelGrid, scheme: NormScheme) -> VoxelGrid:
    """Map densities into [0, 1) via ``1 - base^(-x/s)``; records (scheme, s)."""
    if scheme.key not in SCHEMES:
        raise DomainError(f"scheme {scheme.key!r} is not one of the shipped six")
    if grid.normalization is not None:
        raise DomainError("grid is already normalized")
    scale = _scale(grid, scheme)
    exponent = -grid.densities / scale
    if scheme.base is Base.E:
        values = 1.0 - np.exp(exponent)
    else:
        values = 1.0 - np.power(10.0, exponent)
    return VoxelGrid(values, NormalizationInfo(scheme, scale))


def denormalize(grid: VoxelGrid) -> VoxelGrid:
    """Invert :func:`normalize` using the recorded scale.

    Values at or above 1 (sampling can saturate the angle decode) are
    clamped just below 1 before inversion.
    """
    if grid.normalization is None:
        raise DomainError("grid carries no normalization metadata")
    info = grid.normalization
    values = np.clip(grid.densities, 0.0, 1.0 - _CLAMP_BELOW_ONE)
    if info.scheme.base is Base.E:
        densities = -info.scale * np.log(1.0 - values)
    else:
        densities = -info.scale * np.log10(1.0 - values)
    return VoxelGrid(densities)


def spread_sigma(grid: VoxelGrid) -> float:
    """Population standard deviation over all voxels."""
    return float(np.std(grid.densities))


def histogram(grid: VoxelGrid, bins: int):
    """Equal-width histogram: over [0, 1] for normalized grids, [0, max] raw."""
    if bins < 2:
        raise DomainError(f"need at least 2 bins, got {bins}")
    if grid.normalization is not None:
        upper = 1.0
    else:
        upper = float(grid.densities.max())
        if upper <= 0.0:
            upper = 1.0
    counts, edges = np.histogram(grid.densities, bins=int(bins), range=(0.0, upper))
    return edges, counts


# ---------------------------------------------------------------------------
# synthetic snapshot stand-in


def synthetic_cloud(n_points: int = 100_000, box_size: float = 200.0,
                    seed: int = 20_206, background_fraction: float = 0.03,
                    n_voids: int = 8) -> PointCloud:
    """A clustered test cloud: a Gaussian-blob mixture over a thin uniform
    background, with seeded macroscopic void regions.

    Blobs sit on a jittered 8x8x8 lattice with sites inside the void
    regions removed; blob weights scale with width^3 so every blob has
    the same central density, which keeps the peak-to-median contrast of
    the coarse (16^3) grid mild, as for a real coarse snapshot, while the
    voids keep its spread wide.  Positions wrap periodically into the box.
    """
    if n_points < 1:
        raise DomainError("need at least one point")
    gen = generator(derive_seed(seed, "synthetic-cloud"))
    n_background = int(round(n_points * background_fraction))
    n_clustered = n_points - n_background

    grid_n = 8
    base = (np.arange(grid_n) + 0.5) / grid_n
    sites = np.stack(np.meshgrid(base, base, base, indexing="ij"), axis=-1)
    sites = sites.reshape(-1, 3) + gen.uniform(-0.25, 0.25, size=(grid_n ** 3, 3)) / grid_n
    void_centers = gen.random((n_voids, 3))
    void_radii = gen.uniform(0.16, 0.24, size=n_voids)
    separation = np.abs(sites[:, None, :] - void_centers[None, :, :])
    separation = np.minimum(separation, 1.0 - separation)  # periodic distance
    in_void = (np.sqrt((separation ** 2).sum(-1)) < void_radii[None, :]).any(axis=1)
    centers = sites[~in_void] * box_size

    n_blobs = centers.shape[0]
    widths = gen.uniform(0.055, 0.070, size=n_blobs) * box_size
    weights = widths ** 3 / (widths ** 3).sum()
    membership = gen.choice(n_blobs, size=n_clustered, p=weights)
    offsets = gen.normal(size=(n_clustered, 3)) * widths[membership, None]
    clustered = centers[membership] + offsets

    background = gen.random((n_background, 3)) * box_size
    points = np.vstack([clustered, background]) % box_size
    return PointCloud(points=points, box_size=box_size)


# ---------------------------------------------------------------------------
# round trip


@dataclass(frozen=True)
class CosmicRoundTrip:
    """Round-trip report: correlation at both stages plus the retrieved grid."""

    pcc_normalized: float
    pcc_denormalized: float
    retrieved: VoxelGrid
    retrieved_normalized: VoxelGrid
    shots: int
    seed: int


def cosmic_roundtrip(grid: VoxelGrid, scheme: NormScheme, shots: int,
                     seed: int = 0, max_qubits: int | None = None) -> CosmicRoundTrip:
    """normalize -> mfrqi encode -> sample -> retrieve -> denormalize.

    ``shots == 0`` retrieves from exact probabilities.  The report carries
    the correlation of the normalized arrays and of the denormalized grid
    against the original densities.
    """
    if grid.normalization is not None:
        raise DomainError("round trip expects a raw (un-normalized) grid")
    normalized = normalize(grid, scheme)
    image = ImageArray.volumetric(normalized.densities)
    state = encodings.encode("mfrqi", image, max_qubits=max_qubits)
    if shots == 0:
        weights = measure_probabilities(state)
    else:
        weights = sample_counts(measure_probabilities(state), shots, seed).to_weights()
    retrieved_values = encodings.retrieve("mfrqi", weights, image.dims)
    retrieved_normalized = VoxelGrid(
        retrieved_values.values[..., 0], normalized.normalization
    )
    retrieved = denormalize(retrieved_normalized)
    return CosmicRoundTrip(
        pcc_normalized=pcc(normalized.densities, retrieved_normalized.densities),
        pcc_denormalized=pcc(grid.densities, retrieved.densities),
        retrieved=retrieved,
        retrieved_normalized=retrieved_normalized,
        shots=int(shots),
        seed=int(seed),
    )
