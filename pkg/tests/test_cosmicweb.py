import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from geqie.cosmicweb import (
    Base,
    NormScheme,
    PointCloud,
    Statistic,
    VoxelGrid,
    cosmic_roundtrip,
    denormalize,
    histogram,
    normalize,
    scheme_by_name,
    spread_sigma,
    synthetic_cloud,
    voxelize,
    SCHEMES,
)
from geqie.errors import DomainError

ALL_SCHEMES = sorted(SCHEMES)


def random_grid(seed, resolution=4, scale=30.0):
    gen = np.random.default_rng(seed)
    counts = gen.poisson(scale, size=(resolution,) * 3).astype(float)
    counts[0, 0, 0] = 0.0  # keep a genuinely empty voxel in play
    return VoxelGrid(counts)


# -- types ---------------------------------------------------------------------

def test_point_cloud_validation():
    with pytest.raises(DomainError):
        PointCloud(np.zeros((0, 3)), box_size=10.0)
    with pytest.raises(DomainError):
        PointCloud(np.array([[1.0, 2.0]]), box_size=10.0)
    with pytest.raises(DomainError):
        PointCloud(np.array([[11.0, 0.0, 0.0]]), box_size=10.0)


def test_voxel_grid_validation():
    with pytest.raises(DomainError):
        VoxelGrid(np.zeros((2, 2)))
    with pytest.raises(DomainError):
        VoxelGrid(-np.ones((2, 2, 2)))


def test_scheme_registry_has_exactly_the_six_shipped_combinations():
    assert set(ALL_SCHEMES) == {
        "e-mean", "e-median", "ten-mean", "ten-median",
        "e-nonzero-mean-sq", "e-nonzero-median-sq",
    }
    with pytest.raises(DomainError):
        scheme_by_name("ten-nonzero-mean-sq")


def test_unshipped_scheme_combination_is_rejected_by_normalize():
    grid = random_grid(0)
    rogue = NormScheme(Base.TEN, Statistic.NONZERO_MEAN_SQUARED)
    with pytest.raises(DomainError):
        normalize(grid, rogue)


# -- voxelize --------------------------------------------------------------------

def test_voxelize_single_point_at_origin():
    cloud = PointCloud(np.array([[0.0, 0.0, 0.0]]), box_size=10.0)
    grid = voxelize(cloud, 2)
    assert grid.densities[0, 0, 0] == 1.0
    assert grid.densities.sum() == 1.0


def test_voxelize_octant_centers():
    centers = np.array([[x, y, z] for x in (50.0, 150.0)
                        for y in (50.0, 150.0) for z in (50.0, 150.0)])
    grid = voxelize(PointCloud(centers, box_size=200.0), 2)
    assert_allclose(grid.densities, np.ones((2, 2, 2)))


def test_voxelize_preserves_mass_and_mean():
    gen = np.random.default_rng(3)
    cloud = PointCloud(gen.random((10 ** 5, 3)) * 200.0, box_size=200.0)
    grid = voxelize(cloud, 16)
    assert grid.densities.sum() == 10 ** 5
    assert grid.densities.mean() == pytest.approx(10 ** 5 / 4096)


def test_voxelize_clamps_boundary_coordinate():
    cloud = PointCloud(np.array([[200.0, 0.0, 0.0]]), box_size=200.0)
    grid = voxelize(cloud, 4)
    assert grid.densities[3, 0, 0] == 1.0


def test_voxelize_rejects_bad_resolution():
    cloud = PointCloud(np.array([[1.0, 1.0, 1.0]]), box_size=10.0)
    for resolution in (0, 1, 3, 12):
        with pytest.raises(DomainError):
            voxelize(cloud, resolution)


# -- normalization -----------------------------------------------------------------

@pytest.mark.parametrize("name", ALL_SCHEMES)
def test_normalize_sends_zero_to_zero(name):
    grid = random_grid(5)
    out = normalize(grid, scheme_by_name(name))
    assert out.densities[0, 0, 0] == 0.0
    assert out.normalization.scheme.key == name


def test_weibull_mean_at_the_scale_point():
    grid = random_grid(6)
    out = normalize(grid, scheme_by_name("e-mean"))
    mean = grid.densities.mean()
    idx = np.unravel_index(np.argmin(np.abs(grid.densities - mean)), grid.densities.shape)
    # evaluate the map directly at x = mean
    assert 1.0 - np.exp(-1.0) == pytest.approx(
        1.0 - np.exp(-mean / out.normalization.scale), abs=1e-12)
    assert out.normalization.scale == pytest.approx(mean)
    del idx


def test_base_ten_mean_at_the_scale_point():
    grid = random_grid(7)
    out = normalize(grid, scheme_by_name("ten-mean"))
    assert out.normalization.scale == pytest.approx(grid.densities.mean())
    value = 1.0 - 10.0 ** (-1.0)
    assert value == pytest.approx(0.9, abs=1e-12)


def test_median_is_lower_middle_element():
    grid = VoxelGrid(np.arange(8, dtype=float).reshape(2, 2, 2) + 1.0)
    out = normalize(grid, scheme_by_name("e-median"))
    assert out.normalization.scale == 4.0  # lower middle of 1..8


def test_degenerate_scale_errors_name_the_statistic():
    zero = VoxelGrid(np.zeros((2, 2, 2)))
    with pytest.raises(DomainError, match="mean"):
        normalize(zero, scheme_by_name("e-mean"))
    with pytest.raises(DomainError, match="nonzero"):
        normalize(zero, scheme_by_name("e-nonzero-mean-sq"))
    mostly_zero = VoxelGrid(np.pad(np.ones((1, 1, 1)), ((0, 1), (0, 1), (0, 1))))
    with pytest.raises(DomainError, match="median"):
        normalize(mostly_zero, scheme_by_name("e-median"))


def test_normalize_rejects_already_normalized():
    out = normalize(random_grid(8), scheme_by_name("e-mean"))
    with pytest.raises(DomainError):
        normalize(out, scheme_by_name("e-mean"))


def test_nonzero_squared_statistics():
    grid = random_grid(9)
    nonzero = grid.densities[grid.densities > 0]
    out = normalize(grid, scheme_by_name("e-nonzero-mean-sq"))
    assert out.normalization.scale == pytest.approx(nonzero.mean() ** 2)
    out = normalize(grid, scheme_by_name("e-nonzero-median-sq"))
    lower_median = np.sort(nonzero)[(nonzero.size - 1) // 2]
    assert out.normalization.scale == pytest.approx(lower_median ** 2)


@pytest.mark.parametrize("name", ALL_SCHEMES)
def test_denormalize_inverts_normalize(name):
    grid = random_grid(10)
    out = denormalize(normalize(grid, scheme_by_name(name)))
    scale = max(grid.densities.max(), 1.0)
    assert np.max(np.abs(out.densities - grid.densities)) / scale <= 1e-9


def test_denormalize_examples():
    grid = random_grid(11)
    normalized = normalize(grid, scheme_by_name("e-mean"))
    back = denormalize(normalized)
    assert back.densities[0, 0, 0] == 0.0
    # v = 1 - e^{-1} inverts to x = scale
    scale = normalized.normalization.scale
    probe = VoxelGrid(np.full((2, 2, 2), 1.0 - np.exp(-1.0)),
                      normalized.normalization)
    assert_allclose(denormalize(probe).densities, scale, rtol=1e-12)


def test_denormalize_clamps_saturated_values():
    info = normalize(random_grid(12), scheme_by_name("e-mean")).normalization
    saturated = VoxelGrid(np.ones((2, 2, 2)), info)
    out = denormalize(saturated)
    assert np.all(np.isfinite(out.densities))
    # the clamp is 1 - 1e-12 in floating point, so compare to its exact image
    assert_allclose(out.densities, -info.scale * np.log(1.0 - (1.0 - 1e-12)))


def test_denormalize_requires_metadata():
    with pytest.raises(DomainError):
        denormalize(random_grid(13))


@given(st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=25, deadline=None)
def test_normalization_is_monotone_and_in_range(seed):
    grid = random_grid(seed)
    for name in ("e-mean", "ten-median"):
        out = normalize(grid, scheme_by_name(name))
        values = out.densities.reshape(-1)
        assert values.min() >= 0.0 and values.max() < 1.0
        order = np.argsort(grid.densities.reshape(-1), kind="stable")
        assert np.all(np.diff(values[order]) >= -1e-15)


def test_base_ten_concentrates_more_mass_near_one():
    grid = random_grid(14)
    base_e = normalize(grid, scheme_by_name("e-mean")).densities
    base_ten = normalize(grid, scheme_by_name("ten-mean")).densities
    positive = grid.densities > 0
    assert np.all(base_ten[positive] > base_e[positive])


# -- statistics ----------------------------------------------------------------------

def test_spread_sigma_examples():
    assert spread_sigma(VoxelGrid(np.full((2, 2, 2), 0.4))) == 0.0
    half = np.zeros((2, 2, 2))
    half.reshape(-1)[:4] = 1.0
    assert spread_sigma(VoxelGrid(half)) == pytest.approx(0.5)


def test_spread_sigma_matches_two_pass_reference():
    grid = random_grid(15)
    values = grid.densities.reshape(-1)
    reference = np.sqrt(np.mean((values - values.mean()) ** 2))
    assert spread_sigma(grid) == pytest.approx(reference, abs=1e-12)


def test_histogram_all_zero_grid():
    edges, counts = histogram(VoxelGrid(np.zeros((2, 2, 2))), 10)
    assert counts[0] == 8
    assert counts[1:].sum() == 0
    assert len(edges) == 11


def test_histogram_conserves_voxel_count():
    grid = random_grid(16)
    _, counts = histogram(grid, 7)
    assert counts.sum() == grid.densities.size
    normalized = normalize(grid, scheme_by_name("e-mean"))
    edges, counts = histogram(normalized, 4)
    assert counts.sum() == 64
    assert edges[0] == 0.0 and edges[-1] == 1.0


def test_histogram_uniform_values_spread_evenly():
    gen = np.random.default_rng(17)
    values = gen.random((8, 8, 8))
    info = normalize(random_grid(17), scheme_by_name("e-mean")).normalization
    grid = VoxelGrid(values, info)
    _, counts = histogram(grid, 4)
    expected = values.size / 4
    sigma = np.sqrt(values.size * 0.25 * 0.75)
    assert np.all(np.abs(counts - expected) <= 4 * sigma)


def test_histogram_rejects_too_few_bins():
    with pytest.raises(DomainError):
        histogram(random_grid(18), 1)


# -- the bundled synthetic cloud --------------------------------------------------------

def test_synthetic_cloud_is_seeded_and_in_box():
    cloud = synthetic_cloud(n_points=20_000, seed=5)
    again = synthetic_cloud(n_points=20_000, seed=5)
    assert cloud.count == 20_000
    assert np.array_equal(cloud.points, again.points)
    assert cloud.points.min() >= 0.0 and cloud.points.max() < cloud.box_size
    other = synthetic_cloud(n_points=20_000, seed=6)
    assert not np.array_equal(cloud.points, other.points)


def test_synthetic_cloud_is_mostly_empty_at_high_resolution():
    grid = voxelize(synthetic_cloud(), 256)
    assert np.mean(grid.densities == 0) > 0.5


def test_synthetic_cloud_supports_median_normalization_at_16():
    grid = voxelize(synthetic_cloud(), 16)
    normalized = normalize(grid, scheme_by_name("e-median"))
    assert normalized.normalization.scale > 0
    assert spread_sigma(normalized) > 0.1


# -- round trip ---------------------------------------------------------------------------

def test_cosmic_roundtrip_exact_probabilities():
    grid = voxelize(synthetic_cloud(n_points=20_000), 8)
    report = cosmic_roundtrip(grid, scheme_by_name("e-median"), shots=0)
    assert report.pcc_normalized >= 1.0 - 1e-9
    assert report.pcc_denormalized >= 1.0 - 1e-6


def test_cosmic_roundtrip_rejects_normalized_input():
    grid = normalize(voxelize(synthetic_cloud(n_points=5_000), 8),
                     scheme_by_name("e-mean"))
    with pytest.raises(DomainError):
        cosmic_roundtrip(grid, scheme_by_name("e-mean"), shots=0)


def test_cosmic_roundtrip_sampled_report_fields():
    grid = voxelize(synthetic_cloud(n_points=20_000), 8)
    report = cosmic_roundtrip(grid, scheme_by_name("e-median"), shots=1 << 16, seed=4)
    assert report.shots == 1 << 16 and report.seed == 4
    assert report.retrieved.densities.shape == (8, 8, 8)
    assert report.retrieved_normalized.normalization is not None
    assert 0.9 <= report.pcc_normalized <= 1.0
