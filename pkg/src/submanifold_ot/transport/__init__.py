"""Exact quadratic-cost transport, projection plans and interpolation."""

from .interpolation import displacement_interpolation, interpolation_path
from .projection import (
    ComposedSolution,
    MongeNote,
    composed_solution,
    monge_problem_solvability_note,
    projection_plan,
    pushforward_density,
    solve_composed,
)
from .solver import (
    DualPotentials,
    ExactSolution,
    assignment_applicable,
    check_duals,
    cost_matrix,
    solve_assignment,
    solve_exact,
    solver_report,
    wasserstein2,
)
from .targets import BallTarget, ball_target

__all__ = [
    "BallTarget",
    "ComposedSolution",
    "DualPotentials",
    "ExactSolution",
    "MongeNote",
    "assignment_applicable",
    "ball_target",
    "check_duals",
    "composed_solution",
    "cost_matrix",
    "displacement_interpolation",
    "interpolation_path",
    "monge_problem_solvability_note",
    "projection_plan",
    "pushforward_density",
    "solve_assignment",
    "solve_composed",
    "solve_exact",
    "solver_report",
    "wasserstein2",
]
