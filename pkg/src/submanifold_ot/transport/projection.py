"""Transport by orthogonal projection onto a subspace, and the composed
solution that first projects and then transports inside the subspace."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from ..config import TransportConfig
from ..errors import DimensionMismatchError
from ..geometry.grassmannian import Subspace
from ..geometry.immersion import SampledImmersion
from ..measures.discrete import (
    MERGE_TOL,
    DiscreteMeasure,
    PointMap,
    TransferencePlan,
    immersion_measure,
    plan_cost,
    plan_from_map,
    push_forward,
)
from ..measures.gluing import compose, glue
from .solver import DualPotentials, ExactSolution, solve_exact

logger = logging.getLogger(__name__)

# Maximum distance from E for a target measure to count as supported in E.
IN_SUBSPACE_TOL = 1e-9


def projection_plan(
    mu: DiscreteMeasure, e: Subspace, tol: float = MERGE_TOL
) -> TransferencePlan:
    """The plan (Id x P_E)_# mu. It is optimal between mu and its projection."""
    if mu.dim != e.ambient_dim:
        raise DimensionMismatchError(
            f"Measure in R^{mu.dim} cannot be projected onto a plane in R^{e.ambient_dim}"
        )
    return plan_from_map(mu, e.project, tol)


@dataclass(frozen=True)
class ComposedSolution:
    """Projection followed by exact transport inside E.

    ``duals`` are potentials for the full problem: the source potential is
    the inner one read through the projection plus the squared distance to E.
    """

    plan: TransferencePlan
    projection: TransferencePlan
    inner: ExactSolution
    duals: DualPotentials
    projection_cost: float
    cost: float

    @property
    def inner_cost(self) -> float:
        return self.inner.cost

    @property
    def pythagoras_defect(self) -> float:
        return abs(self.cost - (self.projection_cost + self.inner_cost))


def _check_in_subspace(nu: DiscreteMeasure, e: Subspace) -> None:
    if nu.dim != e.ambient_dim:
        raise DimensionMismatchError(
            f"Target in R^{nu.dim} does not live in R^{e.ambient_dim}"
        )
    offset = float(np.abs(nu.atoms - e.project(nu.atoms)).max())
    if offset > IN_SUBSPACE_TOL:
        raise ValueError(f"Target measure is not supported in E (offset {offset:.3e})")


def solve_composed(
    mu: DiscreteMeasure,
    e: Subspace,
    nu: DiscreteMeasure,
    config: Optional[TransportConfig] = None,
) -> ComposedSolution:
    """Glue the projection plan with the optimal plan from P_E# mu to nu."""
    config = config or TransportConfig()
    _check_in_subspace(nu, e)
    projection = projection_plan(mu, e, config.merge_tol)
    inner = solve_exact(projection.target, nu, config)
    plan = compose(glue(projection, inner.plan))

    offsets = mu.atoms - e.project(mu.atoms)
    distance_sq = np.einsum("md,md->m", offsets, offsets)
    inner_duals = inner.duals
    if inner_duals is None:
        raise ValueError(f"Inner solver '{inner.method}' returned no duals")
    duals = DualPotentials(
        phi=distance_sq + inner_duals.phi[projection.dst], psi=inner_duals.psi.copy()
    )
    solution = ComposedSolution(
        plan=plan,
        projection=projection,
        inner=inner,
        duals=duals,
        projection_cost=plan_cost(projection),
        cost=plan_cost(plan),
    )
    logger.debug(
        f"Composed solution: projection cost {solution.projection_cost:.12g} + "
        f"inner cost {solution.inner_cost:.12g} = {solution.cost:.12g}"
    )
    return solution


def composed_solution(
    mu: DiscreteMeasure,
    e: Subspace,
    nu: DiscreteMeasure,
    config: Optional[TransportConfig] = None,
) -> TransferencePlan:
    return solve_composed(mu, e, nu, config).plan


def pushforward_density(
    m: SampledImmersion,
    e: Subspace,
    f: Union[None, np.ndarray, PointMap] = None,
    eps: float = 1e-8,
    tol: float = MERGE_TOL,
) -> DiscreteMeasure:
    """P_E# (f dv_M) with f set to zero on the critical set.

    Masses sit at P_E x; sample points whose projections coincide are merged,
    which is the discrete form of summing f / J_E over a fiber.
    """
    return push_forward(immersion_measure(m, f, e, eps), e.project, tol)


@dataclass(frozen=True)
class MongeNote:
    injective: bool
    collisions: List[Tuple[int, int]] = field(default_factory=list)
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "injective": self.injective,
            "collisions": [list(pair) for pair in self.collisions],
            "message": self.message,
        }


def monge_problem_solvability_note(
    mu: DiscreteMeasure, e: Subspace, tol: float = 1e-9
) -> MongeNote:
    """Report whether P_E is one to one on the support of mu.

    When two distinct atoms share a projection, transport from P_E# mu back
    to mu must split mass, so that reverse problem has no Monge solution.
    """
    if mu.dim != e.ambient_dim:
        raise DimensionMismatchError(
            f"Measure in R^{mu.dim} cannot be projected onto a plane in R^{e.ambient_dim}"
        )
    coords = e.coordinates(mu.atoms)
    pairs = cKDTree(coords).query_pairs(r=tol, output_type="ndarray")
    collisions = [
        (int(i), int(j))
        for i, j in pairs
        if np.linalg.norm(mu.atoms[i] - mu.atoms[j]) > tol
    ]
    collisions.sort()
    if not collisions:
        return MongeNote(True, [], "Projection is injective on the support")
    message = (
        f"Projection identifies {len(collisions)} pairs of distinct atoms; "
        "the reverse problem from the projected measure has no transport map"
    )
    logger.info(message)
    return MongeNote(False, collisions, message)
