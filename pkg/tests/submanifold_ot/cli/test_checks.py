import math

import numpy as np
import pytest

from submanifold_ot.cli.checks import (
    brute_force_equivalence,
    geodesic_family,
    laplacian_identity,
    orthogonal_equal_cost,
    run_check,
    slice_curvature_law,
    sobolev_constant_check,
    warped_reduction,
)
from submanifold_ot.cli.scenario import CheckSpec, SubspaceSpec, SurfaceSpec
from submanifold_ot.config import AppConfig
from submanifold_ot.inequalities.euclidean import (
    isoperimetric_constant,
    sobolev_constant_closed_form,
)

XY_BASIS = SubspaceSpec(basis=((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)))


def _run(check, kind, **fields):
    spec = CheckSpec(kind=kind, name=kind, **fields)
    return check(spec, np.random.default_rng(0), AppConfig())


def test_orthogonal_equal_cost_payload():
    payload = _run(
        orthogonal_equal_cost, "orthogonal_equal_cost", options={"instances": 10, "atoms": 60}
    )
    assert payload["passed"] is True
    assert payload["instances"] == 10
    assert payload["max_relative_deviation"] <= 1e-12
    # Grid atoms in the unit disc: both second moments are close to 1/2.
    assert payload["second_moments"] == pytest.approx(1.0, rel=0.1)


def test_orthogonal_equal_cost_in_higher_dimension():
    payload = _run(
        orthogonal_equal_cost, "orthogonal_equal_cost", options={"n": 3, "instances": 4, "atoms": 50}
    )
    assert payload["passed"] is True


def test_brute_force_equivalence_payload():
    payload = _run(
        brute_force_equivalence, "brute_force_equivalence", options={"draws": 40, "max_atoms": 5}
    )
    assert payload["passed"] is True
    assert payload["draws"] == 40
    assert payload["max_relative_error"] <= 1e-12


def test_brute_force_rejects_large_instances():
    with pytest.raises(ValueError, match="max_atoms"):
        _run(brute_force_equivalence, "brute_force_equivalence", options={"max_atoms": 9})


def test_geodesic_family_payload():
    payload = _run(geodesic_family, "geodesic_family", options={"atoms": 60, "angles": 4})
    assert payload["passed"] is True
    assert payload["distinct_geodesics"] == 4
    assert payload["max_speed_deviation"] <= 1e-6
    assert payload["max_cost_deviation"] <= 1e-12


def test_geodesic_family_on_orthogonal_discs_in_r4():
    payload = _run(
        geodesic_family,
        "geodesic_family",
        tolerance=1e-6,
        options={"n": 2, "atoms": 200, "angles": 8, "times": [0.0, 0.25, 0.5, 1.0]},
    )
    assert payload["passed"] is True
    assert payload["distinct_geodesics"] == 8
    assert payload["max_speed_deviation"] <= 1e-6


def test_geodesic_family_rejects_lines():
    with pytest.raises(ValueError, match="n >= 2"):
        _run(geodesic_family, "geodesic_family", options={"n": 1})


def test_warped_reduction_payload():
    payload = _run(
        warped_reduction,
        "warped_reduction",
        surface=SurfaceSpec(id="sphere-cap", resolution=24),
        subspace=XY_BASIS,
        options={"p": 1.5, "radius": 0.4},
    )
    assert payload["passed"] is True
    assert set(payload["pairs"]) == {"isoperimetric", "sobolev_l1", "lp_sobolev"}
    assert payload["max_relative_error"] <= 1e-8


def test_warped_reduction_without_lp_pair():
    payload = _run(
        warped_reduction,
        "warped_reduction",
        surface=SurfaceSpec(id="graph", resolution=24),
        subspace=SubspaceSpec(haar_seed=1),
    )
    assert payload["passed"] is True
    assert set(payload["pairs"]) == {"isoperimetric", "sobolev_l1"}


def test_slice_curvature_law_payload():
    payload = _run(
        slice_curvature_law,
        "slice_curvature_law",
        options={"presets": ["hyperbolic", "quadratic"], "heights": [0.4]},
    )
    assert payload["passed"] is True
    assert [row["preset"] for row in payload["slices"]] == ["hyperbolic", "quadratic"]
    assert payload["max_curvature_error"] <= 1e-8


def test_laplacian_identity_converges():
    payload = _run(
        laplacian_identity,
        "laplacian_identity",
        surface=SurfaceSpec(id="sphere-cap"),
        options={"resolutions": [11, 21, 41]},
    )
    assert payload["passed"] is True, payload
    assert payload["residuals"][0] > payload["residuals"][1] > payload["residuals"][2]
    assert all(order >= 1.8 for order in payload["observed_orders"])


def test_laplacian_identity_needs_odd_resolutions():
    spec = CheckSpec(
        kind="laplacian_identity",
        name="even",
        surface=SurfaceSpec(id="catenoid"),
        options={"resolutions": [10, 20]},
    )
    result = run_check(spec, 0, 1, AppConfig())
    assert result.status == "error"
    assert "odd resolutions" in result.payload["error"]


@pytest.mark.slow
def test_sobolev_constant_check_payload():
    payload = _run(
        sobolev_constant_check, "sobolev_constant", options={"n": 3, "p": 2.0, "grid": 3}
    )
    assert payload["passed"] is True
    assert payload["closed_form"] == pytest.approx(sobolev_constant_closed_form(3, 2.0))
    assert payload["relative_error"] <= 1e-4
    assert payload["dilation_deviation"] <= 1e-10
    assert payload["p_to_1_limit"] == pytest.approx(3 * (4 * math.pi / 3) ** (1 / 3))


def test_sobolev_limit_gap_is_reported():
    # The gap field compares the closed form with n omega_n^(1/n).
    closed = sobolev_constant_closed_form(3, 1.01)
    limit = isoperimetric_constant(3)
    assert 0.01 < (closed - limit) / limit < 0.05
