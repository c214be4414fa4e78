"""Warped products dt^2 + w(t)^2 |dy|^2 and their weighted inequalities."""

from .catalog import warped_catalog, warped_slice_chart
from .immersion import (
    WarpedImmersion,
    covariant_second_derivatives,
    full_projection_jacobians,
    warped_geometry,
    warped_projection_jacobian,
    warped_projection_jacobians,
)
from .inequalities import (
    warped_lp_sobolev,
    warped_weighted_isoperimetric,
    warped_weighted_sobolev_l1,
)
from .metric import PRESETS, WarpedMetric, custom_metric, resolve_metric, warped_metric

__all__ = [
    "PRESETS",
    "WarpedImmersion",
    "WarpedMetric",
    "covariant_second_derivatives",
    "custom_metric",
    "full_projection_jacobians",
    "resolve_metric",
    "warped_catalog",
    "warped_geometry",
    "warped_lp_sobolev",
    "warped_metric",
    "warped_projection_jacobian",
    "warped_projection_jacobians",
    "warped_slice_chart",
    "warped_weighted_isoperimetric",
    "warped_weighted_sobolev_l1",
]
