import math

import numpy as np
import pytest

from submanifold_ot.errors import DimensionMismatchError
from submanifold_ot.geometry import catalog, sample_immersion
from submanifold_ot.geometry.grassmannian import Subspace, projection_jacobians
from submanifold_ot.geometry.immersion import ParametricChart
from submanifold_ot.warped.catalog import warped_catalog, warped_slice_chart
from submanifold_ot.warped.immersion import (
    full_projection_jacobians,
    warped_geometry,
    warped_projection_jacobian,
    warped_projection_jacobians,
)
from submanifold_ot.warped.metric import warped_metric


@pytest.fixture(scope="module")
def euclidean_pair():
    flat = sample_immersion(catalog("sphere-cap", resolution=32))
    lifted = warped_geometry(warped_catalog("sphere-cap", resolution=32), warped_metric("euclidean"))
    return flat, lifted


def test_euclidean_preset_reduces_to_flat_geometry(euclidean_pair):
    flat, lifted = euclidean_pair
    assert lifted.ambient_dim == flat.ambient_dim + 1
    assert np.allclose(lifted.tau, 0.0)
    assert np.allclose(lifted.points[:, 1:], flat.points, atol=1e-12)
    assert np.allclose(lifted.weights, flat.weights, rtol=1e-10)
    assert np.allclose(lifted.tangent_frames[:, :, 1:], flat.tangent_frames, atol=1e-10)
    assert np.allclose(lifted.mean_curvature[:, 1:], flat.mean_curvature, atol=1e-8)
    assert np.allclose(lifted.mean_curvature_norm, flat.mean_curvature_norm, atol=1e-8)
    assert lifted.boundary.total_weight == pytest.approx(flat.boundary.total_weight, rel=1e-10)


def test_euclidean_preset_jacobians(euclidean_pair):
    flat, lifted = euclidean_pair
    e = Subspace.haar(3, 2, 7)
    expected = projection_jacobians(flat, e)
    assert np.allclose(warped_projection_jacobians(lifted, e), expected, atol=1e-10)
    assert np.allclose(warped_projection_jacobians(lifted, e.padded(1)), expected, atol=1e-10)
    assert np.allclose(full_projection_jacobians(lifted, e), expected, atol=1e-10)


def test_subspace_must_avoid_the_t_axis(euclidean_pair):
    _, lifted = euclidean_pair
    with pytest.raises(DimensionMismatchError):
        warped_projection_jacobians(lifted, Subspace.coordinate(4, [0, 1]))
    with pytest.raises(DimensionMismatchError):
        warped_projection_jacobians(lifted, Subspace.coordinate(5, [1, 2]))
    with pytest.raises(DimensionMismatchError):
        warped_projection_jacobians(lifted, Subspace.coordinate(3, [0]))


@pytest.mark.parametrize(
    "preset, ratio",
    [
        ("euclidean", lambda t: 0.0),
        ("hyperbolic", lambda t: 1.0),
        ("cosh", lambda t: np.tanh(t)),
        ("quadratic", lambda t: 2 * t / (1 + t**2)),
        ("sine", lambda t: np.cos(t) / (2 + np.sin(t))),
    ],
)
def test_slice_mean_curvature(preset, ratio):
    """A slice {t0} x R^n has |H| = |w'(t0) / w(t0)| in the g_N norm."""
    t0 = 0.4
    m = warped_geometry(warped_slice_chart(t0=t0, resolution=12), warped_metric(preset))
    assert np.allclose(m.mean_curvature_norm, abs(ratio(t0)), atol=1e-8)
    # H points along -d/dt.
    assert np.allclose(m.mean_curvature[:, 1:], 0.0, atol=1e-10)
    w = m.warping[0]
    assert m.volume == pytest.approx(w**2, rel=1e-10)
    assert m.boundary.total_weight == pytest.approx(4 * w, rel=1e-10)


def test_slice_frames_are_g_orthonormal():
    m = warped_geometry(warped_slice_chart(t0=1.0, resolution=8), warped_metric("hyperbolic"))
    m.validate()
    e = Subspace.coordinate(3, [0, 1])
    assert np.allclose(warped_projection_jacobians(m, e), 1.0, atol=1e-12)
    assert warped_projection_jacobian(m, e, 5) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(full_projection_jacobians(m, e), np.exp(-2.0), rtol=1e-10)


def test_warped_catalog_params():
    chart = warped_catalog("flat-disc", t_offset=0.5, t_tilt=0.2, resolution=8)
    assert chart.ambient_dim == 4
    assert chart.params["t_offset"] == 0.5
    assert warped_catalog("slice", t_offset=0.3).name == "warped-slice"
    with pytest.raises(ValueError):
        warped_slice_chart(n=1)


def test_tilted_lift_has_varying_height():
    m = warped_geometry(
        warped_catalog("flat-disc", t_offset=0.5, t_tilt=0.2, resolution=16),
        warped_metric("cosh"),
    )
    assert np.allclose(m.tau, 0.5 + 0.2 * m.points[:, 1])
    assert m.mean_curvature_norm.max() > 0


def test_ambient_dimension_check():
    chart = ParametricChart(
        domain=((0.0, 1.0), (0.0, 1.0)), map=lambda p: p, resolution=4, ambient_dim=2
    )
    with pytest.raises(DimensionMismatchError):
        warped_geometry(chart, warped_metric("euclidean"))


def test_full_jacobian_matches_finite_differences_on_hyperbolic_graph():
    m = warped_geometry(
        warped_catalog("graph", t_offset=0.2, t_tilt=0.3, resolution=16),
        warped_metric("hyperbolic"),
    )
    e = Subspace.haar(3, 2, 5)
    computed = full_projection_jacobians(m, e)
    h = 1e-4
    for index in (0, 37, 120, m.size - 1):
        node = m.params[index]
        columns = []
        for a in range(2):
            shift = np.zeros(2)
            shift[a] = h
            forward = m.chart.evaluate(node[None, :] + shift)[0]
            backward = m.chart.evaluate(node[None, :] - shift)[0]
            columns.append((forward - backward) / (2 * h))
        d = np.stack(columns, axis=1)
        w = math.exp(m.points[index, 0])
        gram = np.outer(d[0], d[0]) + w**2 * d[1:].T @ d[1:]
        expected = abs(np.linalg.det(e.basis @ d[1:])) / math.sqrt(np.linalg.det(gram))
        assert computed[index] == pytest.approx(expected, abs=1e-6)
