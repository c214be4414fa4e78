"""Isoperimetric and Sobolev inequality evaluators and their constants."""

from .euclidean import (
    critical_exponent,
    isoperimetric_constant,
    sobolev_constant_closed_form,
    unit_ball_volume,
)
from .functions import (
    FAMILIES,
    TestFunction,
    chart_bump,
    from_ambient,
    from_differential,
    make_test_function,
    radial_bump,
    smooth_step,
    smoothed_indicator,
)
from .report import InequalityReport, read_report_rows, write_reports_csv
from .sobolev_constant import (
    RadialProfile,
    SobolevSearchResult,
    sobolev_constant,
    sobolev_constant_search,
    sobolev_dual_functional,
)
from .submanifold import (
    classical_alpha,
    classical_isoperimetric,
    classical_sobolev_l1,
    lp_sobolev,
    weighted_isoperimetric,
    weighted_sobolev_l1,
)

__all__ = [
    "FAMILIES",
    "InequalityReport",
    "RadialProfile",
    "SobolevSearchResult",
    "TestFunction",
    "chart_bump",
    "classical_alpha",
    "classical_isoperimetric",
    "classical_sobolev_l1",
    "critical_exponent",
    "from_ambient",
    "from_differential",
    "isoperimetric_constant",
    "lp_sobolev",
    "make_test_function",
    "radial_bump",
    "read_report_rows",
    "smooth_step",
    "smoothed_indicator",
    "sobolev_constant",
    "sobolev_constant_closed_form",
    "sobolev_constant_search",
    "sobolev_dual_functional",
    "unit_ball_volume",
    "weighted_isoperimetric",
    "weighted_sobolev_l1",
    "write_reports_csv",
]
