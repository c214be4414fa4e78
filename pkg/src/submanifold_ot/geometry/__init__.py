"""Sampled immersed submanifolds and Grassmannian constants."""

from .catalog import CATALOG_DEFAULTS, catalog, list_catalog
from .grassmannian import (
    AlphaEstimate,
    Subspace,
    alpha_constant,
    alpha_n1,
    alpha_n1_lower_bound,
    critical_set,
    haar_plane_sample,
    plane_cosine,
    projection_jacobian,
    projection_jacobians,
    wallis_integral,
)
from .immersion import (
    BoundarySample,
    ParametricChart,
    SampledImmersion,
    SmoothPotential,
    export_immersion_csv,
    laplacian_identity_check,
    linear_potential,
    quadratic_potential,
    sample_immersion,
    transform_chart,
)

__all__ = [
    "AlphaEstimate",
    "BoundarySample",
    "CATALOG_DEFAULTS",
    "ParametricChart",
    "SampledImmersion",
    "SmoothPotential",
    "Subspace",
    "alpha_constant",
    "alpha_n1",
    "alpha_n1_lower_bound",
    "catalog",
    "critical_set",
    "export_immersion_csv",
    "haar_plane_sample",
    "laplacian_identity_check",
    "linear_potential",
    "list_catalog",
    "plane_cosine",
    "projection_jacobian",
    "projection_jacobians",
    "quadratic_potential",
    "sample_immersion",
    "transform_chart",
    "wallis_integral",
]
