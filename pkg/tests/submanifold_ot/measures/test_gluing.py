import numpy as np
import pytest

from submanifold_ot.errors import MarginalMismatchError
from submanifold_ot.measures import (
    DiscreteMeasure,
    TransferencePlan,
    compose,
    glue,
    identity_plan,
    plan_from_map,
)


@pytest.fixture
def three_measures(rng):
    mu1 = DiscreteMeasure.from_points(rng.normal(size=(4, 2)), rng.uniform(0.5, 1.5, 4))
    mu2 = DiscreteMeasure.from_points(rng.normal(size=(3, 2)), rng.uniform(0.5, 1.5, 3))
    mu3 = DiscreteMeasure.from_points(rng.normal(size=(5, 2)), rng.uniform(0.5, 1.5, 5))
    return mu1, mu2, mu3


def _product_plan(a, b):
    return TransferencePlan.from_dense(a, b, np.outer(a.masses, b.masses))


def test_glued_marginals_are_exact(three_measures):
    mu1, mu2, mu3 = three_measures
    gamma = glue(_product_plan(mu1, mu2), _product_plan(mu2, mu3))
    assert gamma.validate(tol=1e-12) < 1e-12
    assert np.allclose(gamma.marginal(0, 1).dense(), np.outer(mu1.masses, mu2.masses))
    assert np.allclose(compose(gamma).dense(), np.outer(mu1.masses, mu3.masses))


def test_composition_with_identity(three_measures):
    mu1, mu2, _ = three_measures
    rho = _product_plan(mu1, mu2)
    composed = compose(glue(rho, identity_plan(mu2)))
    assert np.allclose(composed.dense(), rho.dense(), atol=1e-15)


def test_composition_of_maps_is_the_composed_map():
    mu = DiscreteMeasure.from_points([[0.0], [1.0], [2.0]])
    first = plan_from_map(mu, lambda x: 2.0 * x)
    second = plan_from_map(first.target, lambda x: x - 1.0)
    composed = compose(glue(first, second))
    x, y = composed.support_points()
    assert np.allclose(y, 2.0 * x - 1.0)


def test_mismatched_middle_measures_are_rejected(three_measures):
    mu1, mu2, mu3 = three_measures
    other = DiscreteMeasure(mu2.atoms + 1.0, mu2.masses)
    with pytest.raises(MarginalMismatchError):
        glue(_product_plan(mu1, mu2), _product_plan(other, mu3))
