"""Exact discrete optimal transport for the quadratic cost.

General instances go through POT's network simplex (``ot.emd``), which also
returns the dual potentials. Equal-size uniform instances can use the
assignment solver from scipy instead.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import ot
from scipy.optimize import linear_sum_assignment

from ..config import TransportConfig
from ..errors import (
    DimensionMismatchError,
    InfeasibleTransportError,
    IterationLimitError,
    SolverLimitError,
)
from ..measures.discrete import DiscreteMeasure, TransferencePlan
from ..measures.monotonicity import (
    GRAPH_LIMIT,
    MonotonicityCertificate,
    is_cyclically_monotone,
)

logger = logging.getLogger(__name__)

# Network simplex runs before giving up; each retry multiplies numItermax by 10.
MAX_PASSES = 3


@dataclass(frozen=True)
class DualPotentials:
    phi: np.ndarray  # per source atom
    psi: np.ndarray  # per target atom

    def slack(self, costs: np.ndarray) -> np.ndarray:
        """c_ij - phi_i - psi_j; nonnegative for feasible potentials."""
        return costs - self.phi[:, None] - self.psi[None, :]

    def objective(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
        return float(mu.masses @ self.phi + nu.masses @ self.psi)


@dataclass(frozen=True)
class ExactSolution:
    plan: TransferencePlan
    cost: float
    duals: Optional[DualPotentials]
    iterations: int
    method: str

    @property
    def dual_gap(self) -> Optional[float]:
        if self.duals is None:
            return None
        return abs(self.duals.objective(self.plan.source, self.plan.target) - self.cost)


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    return ot.dist(mu.atoms, nu.atoms, metric="sqeuclidean")


def _check_instance(
    mu: DiscreteMeasure, nu: DiscreteMeasure, config: TransportConfig
) -> None:
    if mu.dim != nu.dim:
        raise DimensionMismatchError(
            f"Measures live in R^{mu.dim} and R^{nu.dim}"
        )
    if max(mu.size, nu.size) > config.max_atoms:
        raise SolverLimitError(mu.size, nu.size, config.max_atoms)
    gap = abs(mu.total_mass - nu.total_mass)
    if gap > config.marginal_tol:
        raise InfeasibleTransportError(
            f"Total masses differ by {gap:.3e} ({mu.total_mass} vs {nu.total_mass})"
        )


def solve_exact(
    mu: DiscreteMeasure, nu: DiscreteMeasure, config: Optional[TransportConfig] = None
) -> ExactSolution:
    """Optimal plan and dual potentials for the quadratic cost.

    ``iterations`` counts network-simplex passes: a pass that stops at the
    iteration cap is repeated with a ten times larger cap.

    Raises:
        InfeasibleTransportError: Total masses differ.
        SolverLimitError: More than ``max_atoms`` atoms on a side.
        IterationLimitError: The last pass still stopped at the iteration cap.
    """
    config = config or TransportConfig()
    _check_instance(mu, nu, config)
    costs = cost_matrix(mu, nu)

    num_itermax = config.num_itermax
    for passes in range(1, MAX_PASSES + 1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            matrix, log = ot.emd(
                mu.masses, nu.masses, costs, numItermax=num_itermax, log=True
            )
        message = log.get("warning")
        if message is None:
            break
        if "numItermax" not in message:
            raise InfeasibleTransportError(f"Network simplex failed: {message}")
        if passes == MAX_PASSES:
            raise IterationLimitError(num_itermax, passes)
        logger.warning(f"Network simplex hit {num_itermax} iterations, retrying")
        num_itermax *= 10

    plan = TransferencePlan.from_dense(mu, nu, matrix)
    cost = float(np.sum(matrix * costs))
    duals = DualPotentials(
        phi=np.asarray(log["u"], dtype=float), psi=np.asarray(log["v"], dtype=float)
    )
    logger.debug(
        f"Exact OT {mu.size}x{nu.size}: cost {cost:.12g}, support {plan.support_size}, "
        f"passes {passes}"
    )
    return ExactSolution(
        plan=plan, cost=cost, duals=duals, iterations=passes, method="network-simplex"
    )


def assignment_applicable(mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    return mu.size == nu.size and mu.is_uniform() and nu.is_uniform()


def solve_assignment(
    mu: DiscreteMeasure, nu: DiscreteMeasure, config: Optional[TransportConfig] = None
) -> ExactSolution:
    """Optimal plan for equal-size uniform measures as a permutation."""
    config = config or TransportConfig()
    _check_instance(mu, nu, config)
    if not assignment_applicable(mu, nu):
        raise ValueError("Assignment solver needs equal-size uniform measures")
    costs = cost_matrix(mu, nu)
    rows, cols = linear_sum_assignment(costs)
    mass = np.full(len(rows), mu.masses[0])
    plan = TransferencePlan(mu, nu, rows, cols, mass)
    cost = float(mass @ costs[rows, cols])
    return ExactSolution(plan=plan, cost=cost, duals=None, iterations=1, method="assignment")


def wasserstein2(
    mu: DiscreteMeasure, nu: DiscreteMeasure, config: Optional[TransportConfig] = None
) -> float:
    """W_2 distance; equal-size uniform instances use the assignment solver."""
    if assignment_applicable(mu, nu):
        solution = solve_assignment(mu, nu, config)
    else:
        solution = solve_exact(mu, nu, config)
    return float(np.sqrt(max(solution.cost, 0.0)))


def check_duals(
    solution: ExactSolution, slack_tol: float = 1e-9
) -> Dict[str, float]:
    """Dual feasibility and complementary slackness of an exact solution."""
    if solution.duals is None:
        raise ValueError(f"Solution from '{solution.method}' carries no duals")
    plan = solution.plan
    slack = solution.duals.slack(cost_matrix(plan.source, plan.target))
    violation = float(max(0.0, -slack.min()))
    support_slack = float(np.abs(slack[plan.src, plan.dst]).max())
    if violation > slack_tol or support_slack > slack_tol:
        logger.warning(
            f"Dual certificate off: violation {violation:.3e}, "
            f"support slack {support_slack:.3e}"
        )
    return {"feasibility_violation": violation, "support_slack": support_slack}


def solver_report(
    solution: ExactSolution,
    certificate: Optional[MonotonicityCertificate] = None,
    config: Optional[TransportConfig] = None,
) -> Dict[str, Any]:
    """JSON-ready report with keys cost, support_size, dual_gap,
    monotone_certificate and iterations."""
    config = config or TransportConfig()
    if certificate is None and solution.plan.support_size <= GRAPH_LIMIT:
        certificate = is_cyclically_monotone(
            solution.plan,
            max_cycle_len=config.max_cycle_len,
            mode="sampled",
            random_cycles=config.random_cycles,
        )
    return {
        "cost": solution.cost,
        "support_size": solution.plan.support_size,
        "dual_gap": solution.dual_gap,
        "monotone_certificate": (
            certificate.is_monotone if certificate is not None else None
        ),
        "iterations": solution.iterations,
    }
