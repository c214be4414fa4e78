"""Weighted and classical isoperimetric and Sobolev inequalities on sampled
submanifolds of Euclidean space.

All integrals are midpoint sums with the immersion's volume weights. The
helpers ending in ``_sides`` take raw per-point densities so the warped
evaluators can share them.
"""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..config import InequalityConfig
from ..errors import CriticalSupportError, MissingBoundaryError
from ..geometry.grassmannian import Subspace, alpha_constant, alpha_n1, projection_jacobians
from ..geometry.immersion import SampledImmersion
from .euclidean import (
    check_sobolev_exponent,
    critical_exponent,
    isoperimetric_constant,
    sobolev_constant_closed_form,
    unit_ball_volume,
)
from .functions import ChartSampled, TestFunction, boundary_collar_violation
from .report import InequalityReport

logger = logging.getLogger(__name__)

# Flags recorded on every L^p report: the curvature term is |H|^p |u|^p and
# both right-hand terms carry their 1/p power, so each side has degree one.
LP_FLAGS: Dict[str, Any] = {
    "curvature_term_proof_form": True,
    "holder_homogeneous_rhs": True,
}


def _describe(m: ChartSampled) -> Dict[str, Any]:
    chart = m.chart
    return {
        "surface": chart.name,
        "params": dict(chart.params),
        "resolution": tuple(chart.resolution),  # type: ignore[arg-type]
    }


def require_boundary_length(m: ChartSampled, weight: Optional[np.ndarray] = None) -> float:
    boundary = getattr(m, "boundary", None)
    if boundary is None:
        raise MissingBoundaryError(
            f"Surface '{m.chart.name}' has no boundary faces; "
            "isoperimetric checks need a domain with boundary"
        )
    if weight is None:
        return boundary.total_weight
    return float(boundary.weights @ weight)


def require_compact_support(m: ChartSampled, u: TestFunction) -> None:
    leak = boundary_collar_violation(m, u)
    if leak > 0.0:
        raise ValueError(
            f"Test function '{u.name}' is not zero next to the boundary (max {leak:.3e})"
        )


def _check_dimension(n: int) -> None:
    if n < 2:
        raise ValueError(f"These inequalities need n >= 2, got {n}")


def isoperimetric_sides(
    n: int,
    weights: np.ndarray,
    lhs_density: np.ndarray,
    perimeter: float,
    curvature_density: np.ndarray,
) -> Tuple[float, float]:
    """n omega_n^(1/n) (int lhs_density)^((n-1)/n) against perimeter + n int curvature."""
    lhs = isoperimetric_constant(n) * float(weights @ lhs_density) ** ((n - 1) / n)
    rhs = perimeter + n * float(weights @ curvature_density)
    return lhs, rhs


def sobolev_l1_sides(
    n: int,
    weights: np.ndarray,
    lhs_density: np.ndarray,
    u: TestFunction,
    gradient_density: np.ndarray,
    curvature_density: np.ndarray,
) -> Tuple[float, float]:
    absu = np.abs(u.values)
    inner = float(weights @ (lhs_density * absu ** (n / (n - 1))))
    lhs = isoperimetric_constant(n) * inner ** ((n - 1) / n)
    rhs = float(weights @ (gradient_density * u.gradient_norm)) + n * float(
        weights @ (curvature_density * absu)
    )
    return lhs, rhs


def lp_sides(
    n: int,
    p: float,
    s_np: float,
    weights: np.ndarray,
    lhs_density: np.ndarray,
    rhs_density: np.ndarray,
    u: TestFunction,
    curvature_norm: np.ndarray,
) -> Tuple[float, float]:
    exponent = critical_exponent(n, p)
    absu = np.abs(u.values)
    lhs = s_np * float(weights @ (lhs_density * absu**exponent)) ** (1.0 / exponent)
    gradient_term = float(weights @ (rhs_density * u.gradient_norm**p)) ** (1.0 / p)
    curvature_term = float(
        weights @ (rhs_density * curvature_norm**p * absu**p)
    ) ** (1.0 / p)
    rhs = gradient_term + n * (n - p) / (p * (n - 1)) * curvature_term
    return lhs, rhs


def negative_power_weight(
    jacobians: np.ndarray, u: TestFunction, n: int, p: float, floor: float
) -> np.ndarray:
    """J_E^(-(p-1)/(n-1)) with J_E clipped at ``floor``.

    Raises:
        CriticalSupportError: J_E is below ``floor`` somewhere on the support.
    """
    support = u.support
    bad = support[jacobians[support] < floor]
    if len(bad):
        raise CriticalSupportError(bad, floor)
    return np.maximum(jacobians, floor) ** (-(p - 1.0) / (n - 1.0))


def weighted_isoperimetric(m: SampledImmersion, e: Subspace) -> InequalityReport:
    """n w_n^(1/n) (int J_E^(1/(n-1)))^((n-1)/n) <= |boundary| + n int |H|."""
    n = m.intrinsic_dim
    _check_dimension(n)
    perimeter = require_boundary_length(m)
    jac = projection_jacobians(m, e)
    lhs, rhs = isoperimetric_sides(
        n, m.weights, jac ** (1.0 / (n - 1)), perimeter, m.mean_curvature_norm
    )
    return InequalityReport(
        name="weighted_isoperimetric",
        lhs=lhs,
        rhs=rhs,
        constants={"omega_n": unit_ball_volume(n)},
        **_describe(m),
    )


def weighted_sobolev_l1(
    m: SampledImmersion, e: Subspace, u: TestFunction
) -> InequalityReport:
    n = m.intrinsic_dim
    _check_dimension(n)
    require_compact_support(m, u)
    jac = projection_jacobians(m, e)
    lhs, rhs = sobolev_l1_sides(
        n, m.weights, jac ** (1.0 / (n - 1)), u, np.ones(m.size), m.mean_curvature_norm
    )
    return InequalityReport(
        name="weighted_sobolev_l1",
        lhs=lhs,
        rhs=rhs,
        constants={"omega_n": unit_ball_volume(n)},
        flags={"function": u.to_dict()},
        **_describe(m),
    )


def classical_alpha(n: int, k: int, config: Optional[InequalityConfig] = None) -> float:
    """alpha_{n,k}: 1 in codimension 0, quadrature for k = 1, Monte Carlo above."""
    config = config or InequalityConfig()
    if k == 0:
        return 1.0
    if k == 1:
        return alpha_n1(n, config.alpha_quadrature_order)
    return alpha_constant(n, k, num_samples=200_000, seed=0).value


def classical_isoperimetric(m: SampledImmersion, alpha: float) -> InequalityReport:
    """n w_n^(1/n) alpha Vol^((n-1)/n) <= |boundary| + n int |H|."""
    n = m.intrinsic_dim
    _check_dimension(n)
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    perimeter = require_boundary_length(m)
    lhs, rhs = isoperimetric_sides(
        n, m.weights, np.full(m.size, alpha ** (n / (n - 1))), perimeter,
        m.mean_curvature_norm,
    )
    return InequalityReport(
        name="classical_isoperimetric",
        lhs=lhs,
        rhs=rhs,
        constants={"omega_n": unit_ball_volume(n), "alpha": alpha},
        **_describe(m),
    )


def classical_sobolev_l1(
    m: SampledImmersion, alpha: float, u: TestFunction
) -> InequalityReport:
    n = m.intrinsic_dim
    _check_dimension(n)
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    require_compact_support(m, u)
    lhs, rhs = sobolev_l1_sides(
        n,
        m.weights,
        np.full(m.size, alpha ** (n / (n - 1))),
        u,
        np.ones(m.size),
        m.mean_curvature_norm,
    )
    return InequalityReport(
        name="classical_sobolev_l1",
        lhs=lhs,
        rhs=rhs,
        constants={"omega_n": unit_ball_volume(n), "alpha": alpha},
        flags={"function": u.to_dict()},
        **_describe(m),
    )


def lp_sobolev(
    m: SampledImmersion,
    e: Subspace,
    u: TestFunction,
    p: float,
    s_np: Optional[float] = None,
    config: Optional[InequalityConfig] = None,
) -> InequalityReport:
    """Weighted L^p Sobolev inequality with the projection Jacobian as weight.

    The report compares
    S (int J^(1/(n-1)) |u|^(np/(n-p)))^((n-p)/(np)) with
    (int J^(-(p-1)/(n-1)) |grad u|^p)^(1/p)
    + n(n-p)/(p(n-1)) (int J^(-(p-1)/(n-1)) |H|^p |u|^p)^(1/p).

    Args:
        s_np: Sobolev constant; the closed-form sharp value when omitted.

    Raises:
        CriticalSupportError: J_E drops below the configured floor on the
            support of ``u``.
    """
    config = config or InequalityConfig()
    n = m.intrinsic_dim
    check_sobolev_exponent(n, p)
    require_compact_support(m, u)
    s_np = sobolev_constant_closed_form(n, p) if s_np is None else float(s_np)
    jac = projection_jacobians(m, e)
    rhs_density = negative_power_weight(jac, u, n, p, config.jacobian_floor)
    lhs, rhs = lp_sides(
        n, p, s_np, m.weights, jac ** (1.0 / (n - 1)), rhs_density, u,
        m.mean_curvature_norm,
    )
    return InequalityReport(
        name="lp_sobolev",
        lhs=lhs,
        rhs=rhs,
        constants={"omega_n": unit_ball_volume(n), "S_np": s_np, "p": p},
        flags={
            **LP_FLAGS,
            "jacobian_floor": config.jacobian_floor,
            "function": u.to_dict(),
        },
        **_describe(m),
    )
