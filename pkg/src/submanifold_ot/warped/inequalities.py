"""Weighted isoperimetric and Sobolev inequalities in warped products.

Weights are evaluated at tau, the t coordinate of each sampled point.
"""

import logging
from typing import Optional

import numpy as np

from ..config import InequalityConfig
from ..geometry.grassmannian import Subspace
from ..inequalities.euclidean import (
    check_sobolev_exponent,
    sobolev_constant_closed_form,
    unit_ball_volume,
)
from ..inequalities.functions import TestFunction
from ..inequalities.report import InequalityReport
from ..inequalities.submanifold import (
    LP_FLAGS,
    isoperimetric_sides,
    lp_sides,
    negative_power_weight,
    require_boundary_length,
    require_compact_support,
    sobolev_l1_sides,
)
from .immersion import WarpedImmersion, warped_projection_jacobians

logger = logging.getLogger(__name__)


def _describe(m: WarpedImmersion) -> dict:
    return {
        "surface": m.surface,
        "params": {**m.surface_params, "metric": m.metric.name, **m.metric.params},
        "resolution": tuple(m.chart.resolution),  # type: ignore[arg-type]
    }


def _volume_density(m: WarpedImmersion, e: Subspace) -> np.ndarray:
    n = m.intrinsic_dim
    return (m.warping**n * warped_projection_jacobians(m, e)) ** (1.0 / (n - 1))


def warped_weighted_isoperimetric(m: WarpedImmersion, e: Subspace) -> InequalityReport:
    """n w_n^(1/n) (int (w^n J_E)^(1/(n-1)))^((n-1)/n)
    <= int_boundary w + n int w |H|."""
    n = m.intrinsic_dim
    if n < 2:
        raise ValueError(f"These inequalities need n >= 2, got {n}")
    perimeter = require_boundary_length(m, m.boundary_warping)
    w = m.warping
    lhs, rhs = isoperimetric_sides(
        n, m.weights, _volume_density(m, e), perimeter, w * m.mean_curvature_norm
    )
    return InequalityReport(
        name="warped_weighted_isoperimetric",
        lhs=lhs,
        rhs=rhs,
        constants={"omega_n": unit_ball_volume(n)},
        **_describe(m),
    )


def warped_weighted_sobolev_l1(
    m: WarpedImmersion, e: Subspace, u: TestFunction
) -> InequalityReport:
    n = m.intrinsic_dim
    if n < 2:
        raise ValueError(f"These inequalities need n >= 2, got {n}")
    require_compact_support(m, u)
    w = m.warping
    lhs, rhs = sobolev_l1_sides(
        n, m.weights, _volume_density(m, e), u, w, w * m.mean_curvature_norm
    )
    return InequalityReport(
        name="warped_weighted_sobolev_l1",
        lhs=lhs,
        rhs=rhs,
        constants={"omega_n": unit_ball_volume(n)},
        flags={"function": u.to_dict()},
        **_describe(m),
    )


def warped_lp_sobolev(
    m: WarpedImmersion,
    e: Subspace,
    u: TestFunction,
    p: float,
    s_np: Optional[float] = None,
    config: Optional[InequalityConfig] = None,
) -> InequalityReport:
    """L^p inequality with weights J_E^(-(p-1)/(n-1)) w^((n-p)/(n-1)) on the right.

    Raises:
        CriticalSupportError: J_E drops below the configured floor on the
            support of ``u``.
    """
    config = config or InequalityConfig()
    n = m.intrinsic_dim
    check_sobolev_exponent(n, p)
    require_compact_support(m, u)
    s_np = sobolev_constant_closed_form(n, p) if s_np is None else float(s_np)
    jac = warped_projection_jacobians(m, e)
    rhs_density = negative_power_weight(jac, u, n, p, config.jacobian_floor)
    rhs_density = rhs_density * m.warping ** ((n - p) / (n - 1))
    lhs, rhs = lp_sides(
        n, p, s_np, m.weights, _volume_density(m, e), rhs_density, u,
        m.mean_curvature_norm,
    )
    return InequalityReport(
        name="warped_lp_sobolev",
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
