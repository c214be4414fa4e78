import csv
import math

import numpy as np
import pytest

from submanifold_ot.config import GeometryConfig
from submanifold_ot.errors import (
    DegenerateMetricError,
    DimensionMismatchError,
    NonFiniteMapError,
)
from submanifold_ot.geometry import (
    ParametricChart,
    catalog,
    export_immersion_csv,
    laplacian_identity_check,
    linear_potential,
    quadratic_potential,
    sample_immersion,
    transform_chart,
)


def _equator_band(m, margin=0.2):
    theta = m.params[:, 0]
    return (theta > margin) & (theta < math.pi - margin)


def test_flat_square_volume_and_curvature(flat_square):
    """A flat square has exact volume and no mean curvature."""
    assert flat_square.size == 16 * 16
    assert flat_square.volume == pytest.approx(4.0, rel=1e-12)
    assert flat_square.mean_curvature_norm.max() < 1e-6
    assert flat_square.boundary is not None
    assert flat_square.boundary.total_weight == pytest.approx(8.0, rel=1e-9)


def test_nodes_are_cell_midpoints():
    chart = catalog("graph", amplitude=0.0, resolution=4)
    nodes = chart.nodes()
    assert nodes.shape == (16, 2)
    assert np.allclose(chart.axis_nodes(0), [-0.75, -0.25, 0.25, 0.75])
    # C order: the last axis varies fastest.
    assert np.allclose(nodes[:4, 0], -0.75)
    assert chart.cell_of(5) == (1, 1)


def test_frames_are_orthonormal(unit_sphere):
    frames = unit_sphere.tangent_frames
    gram = np.einsum("nid,njd->nij", frames, frames)
    assert np.abs(gram - np.eye(2)).max() < 1e-10
    normal_part = np.einsum("nid,nd->ni", frames, unit_sphere.mean_curvature)
    assert np.abs(normal_part).max() < 1e-8


def test_unit_sphere_mean_curvature(unit_sphere):
    """Away from the poles the sphere has |H| = 1 with H pointing inward."""
    band = _equator_band(unit_sphere)
    norms = unit_sphere.mean_curvature_norm[band]
    assert np.abs(norms - 1.0).max() < 5e-3
    assert np.allclose(
        unit_sphere.mean_curvature[band], -unit_sphere.points[band], atol=5e-3
    )


def test_unit_sphere_volume(unit_sphere):
    assert unit_sphere.volume == pytest.approx(4 * math.pi, rel=1e-3)
    assert unit_sphere.boundary is None


def test_catenoid_is_minimal(catenoid_surface):
    assert catenoid_surface.mean_curvature_norm.max() < 1e-3


def test_flat_disc_boundary_conormals(flat_disc):
    """The unit disc has boundary length 2 pi and radial outward conormals."""
    boundary = flat_disc.boundary
    assert flat_disc.volume == pytest.approx(math.pi, rel=1e-6)
    assert boundary.total_weight == pytest.approx(2 * math.pi, rel=1e-6)
    radial = boundary.points / np.linalg.norm(boundary.points, axis=1, keepdims=True)
    assert np.allclose(boundary.conormals, radial, atol=1e-6)


def test_sampled_arrays_are_read_only(flat_square):
    with pytest.raises(ValueError):
        flat_square.points[0, 0] = 1.0


def test_rigid_motion_preserves_geometry(unit_sphere):
    angle = 0.7
    rotation = np.array(
        [
            [math.cos(angle), -math.sin(angle), 0.0],
            [math.sin(angle), math.cos(angle), 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    moved = sample_immersion(
        transform_chart(unit_sphere.chart, rotation, translation=[1.0, -2.0, 0.5])
    )
    assert moved.volume == pytest.approx(unit_sphere.volume, rel=1e-10)
    assert np.allclose(
        moved.mean_curvature_norm, unit_sphere.mean_curvature_norm, atol=1e-6
    )


def test_transform_rejects_wrong_rotation_shape(unit_sphere):
    with pytest.raises(DimensionMismatchError):
        transform_chart(unit_sphere.chart, np.eye(4))


def test_resolution_below_three_is_rejected():
    with pytest.raises(ValueError):
        sample_immersion(catalog("graph", resolution=2))


def test_degenerate_metric_reports_cell():
    chart = ParametricChart(
        domain=((0.0, 1.0), (0.0, 1.0)),
        map=lambda p: np.stack([p[:, 0], np.zeros(len(p)), np.zeros(len(p))], axis=1),
        resolution=4,
        ambient_dim=3,
    )
    with pytest.raises(DegenerateMetricError) as excinfo:
        sample_immersion(chart)
    assert excinfo.value.cell == (0, 0)


def test_non_finite_map_is_reported():
    def broken(p):
        out = np.stack([p[:, 0], p[:, 1], np.zeros(len(p))], axis=1)
        out[p[:, 0] > 0.5, 2] = np.nan
        return out

    chart = ParametricChart(
        domain=((0.0, 1.0), (0.0, 1.0)), map=broken, resolution=4, ambient_dim=3
    )
    with pytest.raises(NonFiniteMapError) as excinfo:
        sample_immersion(chart)
    assert excinfo.value.node[0] > 0.5


def test_chart_shape_mismatch_is_reported():
    chart = ParametricChart(
        domain=((0.0, 1.0), (0.0, 1.0)), map=lambda p: p, resolution=4, ambient_dim=3
    )
    with pytest.raises(DimensionMismatchError):
        sample_immersion(chart)


def test_fd_fraction_is_bounded():
    with pytest.raises(ValueError):
        GeometryConfig(fd_fraction=0.3)


def test_laplacian_identity_for_linear_potential(catenoid_surface):
    """For linear F the Laplacian of F o X is n <grad F, H>."""
    potential = linear_potential([0.3, -1.0, 2.0])
    for index in (0, 500, catenoid_surface.size - 1):
        residual = laplacian_identity_check(catenoid_surface, potential, index)
        assert residual < 1e-5


def test_laplacian_identity_for_quadratic_potential(unit_sphere):
    potential = quadratic_potential(np.eye(3))
    index = 32 * 64 + 10
    assert laplacian_identity_check(unit_sphere, potential, index) < 5e-3


def test_laplacian_identity_rejects_singular_potential(unit_sphere):
    singular = quadratic_potential(np.full((3, 3), np.inf))
    with pytest.raises(ValueError):
        laplacian_identity_check(unit_sphere, singular, 0)


def test_export_immersion_csv(tmp_path, flat_square):
    path = export_immersion_csv(flat_square, tmp_path / "out" / "square.csv")
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    header = rows[0]
    assert header[:5] == ["point_id", "x0", "x1", "x2", "weight"]
    assert len(header) == 1 + 3 + 1 + 3 + 6
    assert len(rows) == flat_square.size + 1
    assert float(rows[1][4]) == pytest.approx(flat_square.weights[0])


def _centre_residuals(name, potential, resolutions):
    steps, residuals = [], []
    for resolution in resolutions:
        m = sample_immersion(catalog(name, resolution=resolution))
        centre = np.array([0.5 * (lo + hi) for lo, hi in m.chart.domain])
        index = int(np.argmin(np.linalg.norm(m.params - centre, axis=1)))
        assert np.allclose(m.params[index], centre, atol=1e-12)
        steps.append(max(m.steps))
        residuals.append(laplacian_identity_check(m, potential, index))
    return steps, residuals


@pytest.mark.parametrize(
    "name, potential",
    [
        ("sphere-cap", quadratic_potential(np.diag([1.0, 2.0, 3.0]), [0.5, -0.2, 0.1])),
        ("catenoid", quadratic_potential([[1.0, 0.3, 0.0], [0.3, 2.0, -0.5], [0.0, -0.5, 0.5]])),
    ],
)
def test_laplacian_identity_residual_converges_at_least_quadratically(name, potential):
    steps, residuals = _centre_residuals(name, potential, [11, 21, 41])
    for (h1, r1), (h2, r2) in zip(zip(steps, residuals), zip(steps[1:], residuals[1:])):
        assert math.log(r1 / r2) / math.log(h1 / h2) >= 1.8
