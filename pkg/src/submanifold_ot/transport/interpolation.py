"""Displacement interpolation along a transference plan."""

from typing import List

import numpy as np

from ..measures.discrete import MERGE_TOL, DiscreteMeasure, TransferencePlan, merge_atoms


def displacement_interpolation(
    rho: TransferencePlan, t: float, tol: float = MERGE_TOL
) -> DiscreteMeasure:
    """Measure with mass rho(i, j) at (1 - t) x_i + t y_j.

    Coinciding interpolated atoms are merged. For an optimal plan the
    interpolants form a constant-speed W_2 geodesic.

    Raises:
        ValueError: t outside [0, 1].
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"Interpolation time must lie in [0, 1], got {t}")
    x, y = rho.support_points()
    atoms, masses, _ = merge_atoms((1.0 - t) * x + t * y, rho.mass, tol)
    return DiscreteMeasure(atoms, masses)


def interpolation_path(
    rho: TransferencePlan, times: np.ndarray, tol: float = MERGE_TOL
) -> List[DiscreteMeasure]:
    return [displacement_interpolation(rho, float(t), tol) for t in np.asarray(times)]
