import numpy as np
import pytest

from submanifold_ot.errors import DimensionMismatchError
from submanifold_ot.geometry import Subspace, catalog, sample_immersion
from submanifold_ot.measures import (
    DiscreteMeasure,
    immersion_measure,
    is_cyclically_monotone,
    plan_cost,
)
from submanifold_ot.transport import (
    ball_target,
    cost_matrix,
    monge_problem_solvability_note,
    projection_plan,
    pushforward_density,
    solve_composed,
    solve_exact,
)


@pytest.fixture
def helix():
    t = np.linspace(0.0, 4 * np.pi, 30)
    return DiscreteMeasure.from_points(np.stack([np.cos(t), np.sin(t), 0.2 * t], axis=1))


def test_projection_of_a_point():
    mu = DiscreteMeasure.from_points([[1.0, 1.0, 1.0]])
    rho = projection_plan(mu, Subspace.coordinate(3, [0, 1]))
    assert np.allclose(rho.target.atoms, [[1.0, 1.0, 0.0]])
    assert plan_cost(rho) == pytest.approx(1.0)


def test_projection_plan_is_optimal(rng):
    mu = DiscreteMeasure.from_points(rng.normal(size=(20, 4)), rng.uniform(1, 2, 20))
    e = Subspace.haar(4, 2, seed=3)
    rho = projection_plan(mu, e)
    assert plan_cost(rho) == pytest.approx(solve_exact(mu, rho.target).cost, abs=1e-9)
    assert is_cyclically_monotone(rho, mode="sampled").is_monotone


def test_projection_dimension_check():
    mu = DiscreteMeasure.from_points([[1.0, 2.0]])
    with pytest.raises(DimensionMismatchError):
        projection_plan(mu, Subspace.coordinate(3, [0, 1]))


def test_composed_solution_is_optimal(helix):
    e = Subspace.haar(3, 2, seed=9)
    nu = ball_target(e, num_atoms=40).measure
    composed = solve_composed(helix, e, nu)
    direct = solve_exact(helix, nu)
    assert composed.cost == pytest.approx(direct.cost, abs=1e-9)
    assert composed.pythagoras_defect <= 1e-10 * max(1.0, composed.cost)

    slack = composed.duals.slack(cost_matrix(helix, nu))
    assert slack.min() >= -1e-9
    assert composed.duals.objective(helix, nu) == pytest.approx(composed.cost, abs=1e-9)


def test_composed_solution_merges_fibers():
    mu = DiscreteMeasure.from_points([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0]])
    e = Subspace.coordinate(3, [0, 1])
    nu = DiscreteMeasure.from_points([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.2, 0.2, 0.0]])
    composed = solve_composed(mu, e, nu)
    assert composed.projection.target.size == 2
    assert composed.cost == pytest.approx(solve_exact(mu, nu).cost, abs=1e-12)


def test_composed_target_must_lie_in_the_plane(helix):
    e = Subspace.coordinate(3, [0, 1])
    with pytest.raises(ValueError, match="not supported in E"):
        solve_composed(helix, e, DiscreteMeasure.from_points([[0.0, 0.0, 1.0]]))


def test_pushforward_density_of_flat_disc(flat_disc):
    e = Subspace.coordinate(3, [0, 1])
    image = pushforward_density(flat_disc, e)
    assert image.size == flat_disc.size
    assert image.total_mass == pytest.approx(1.0)
    assert np.abs(image.atoms[:, 2]).max() == 0.0


def test_pushforward_density_folds_the_sphere(unit_sphere):
    e = Subspace.coordinate(3, [0, 1])
    image = pushforward_density(unit_sphere, e, eps=1e-3, tol=1e-9)
    assert image.size <= unit_sphere.size // 2
    assert image.total_mass == pytest.approx(1.0)


def test_monge_note_distinguishes_graphs_from_spheres(unit_sphere):
    e = Subspace.coordinate(3, [0, 1])
    graph = sample_immersion(catalog("graph", resolution=16))
    note = monge_problem_solvability_note(immersion_measure(graph), e)
    assert note.injective
    assert note.collisions == []

    folded = monge_problem_solvability_note(immersion_measure(unit_sphere), e)
    assert not folded.injective
    assert folded.collisions
    assert folded.to_dict()["injective"] is False
