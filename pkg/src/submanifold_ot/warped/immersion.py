"""Sampled immersions in the warped product R x R^{n+k}.

Ambient points are (t, y). Frames are orthonormal for g_N and the mean
curvature uses the Levi-Civita connection of g_N, whose only nonzero
Christoffel symbols are Gamma^t_{y_i y_j} = -w w' delta_ij and
Gamma^{y_i}_{t y_j} = Gamma^{y_i}_{y_j t} = (w'/w) delta_ij.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..config import GeometryConfig
from ..errors import DimensionMismatchError
from ..geometry.grassmannian import Subspace
from ..geometry.immersion import (
    BoundarySample,
    ParametricChart,
    chart_derivatives,
    checked_gram_determinants,
    finite_difference_steps,
    gram_matrices,
    mean_curvature_vectors,
    orthonormal_frames,
    sample_boundary,
)
from .metric import WarpedMetric

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WarpedImmersion:
    ambient_dim: int
    intrinsic_dim: int
    points: np.ndarray  # (N, 1 + n + k), first column is t
    tangent_frames: np.ndarray  # (N, n, d), g_N-orthonormal rows
    mean_curvature: np.ndarray  # (N, d)
    weights: np.ndarray
    boundary: Optional[BoundarySample]
    params: np.ndarray
    jacobians: np.ndarray
    induced_metric: np.ndarray
    metric_diagonal: np.ndarray  # (N, d)
    steps: Tuple[float, ...]
    metric: WarpedMetric = field(compare=False, repr=False)
    chart: ParametricChart = field(compare=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def tau(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def warping(self) -> np.ndarray:
        return self.metric.values(self.tau)[0]

    @property
    def boundary_warping(self) -> np.ndarray:
        if self.boundary is None:
            return np.empty(0)
        return self.metric.values(self.boundary.points[:, 0])[0]

    @property
    def mean_curvature_norm(self) -> np.ndarray:
        """|H| measured with g_N."""
        return np.sqrt(
            np.einsum("nd,nd,nd->n", self.mean_curvature, self.metric_diagonal, self.mean_curvature)
        )

    @property
    def volume(self) -> float:
        return float(self.weights.sum())

    @property
    def surface(self) -> str:
        return self.chart.name

    @property
    def surface_params(self) -> Dict[str, Any]:
        return dict(self.chart.params)

    def validate(self, frame_tol: float = 1e-8, normal_tol: float = 1e-8) -> None:
        gram = np.einsum(
            "nid,nd,njd->nij", self.tangent_frames, self.metric_diagonal, self.tangent_frames
        )
        frame_err = float(np.abs(gram - np.eye(self.intrinsic_dim)).max())
        if frame_err > frame_tol:
            raise ValueError(f"Warped frames not g_N-orthonormal (error {frame_err:.2e})")
        normal_err = float(
            np.abs(
                np.einsum(
                    "nid,nd,nd->ni",
                    self.tangent_frames,
                    self.metric_diagonal,
                    self.mean_curvature,
                )
            ).max()
        )
        if normal_err > normal_tol:
            raise ValueError(
                f"Warped mean curvature not normal (error {normal_err:.2e})"
            )


def covariant_second_derivatives(
    jacobians: np.ndarray, second: np.ndarray, w: np.ndarray, w_prime: np.ndarray
) -> np.ndarray:
    """d_a d_b X + Gamma(d_a X, d_b X) for the warped connection."""
    jt = jacobians[:, 0, :]  # (N, n)
    jy = jacobians[:, 1:, :]  # (N, m, n)
    out = np.array(second, dtype=float)
    out[:, 0] -= (w * w_prime)[:, None, None] * np.einsum("nia,nib->nab", jy, jy)
    mixed = jt[:, None, :, None] * jy[:, :, None, :] + jy[:, :, :, None] * jt[:, None, None, :]
    out[:, 1:] += (w_prime / w)[:, None, None, None] * mixed
    return out


def warped_geometry(
    chart: ParametricChart,
    metric: WarpedMetric,
    config: Optional[GeometryConfig] = None,
) -> WarpedImmersion:
    """Sample a chart in R x R^{n+k} with the warped metric.

    Raises:
        DimensionMismatchError: The chart does not map into R x R^{n+k}, k >= 0.
        DegenerateMetricError: Induced metric determinant at or below the floor.
    """
    config = config or GeometryConfig()
    n = chart.intrinsic_dim
    if n < 2:
        raise ValueError("Intrinsic dimension must be at least 2")
    if chart.ambient_dim < n + 1:
        raise DimensionMismatchError(
            f"A {n}-dimensional chart needs an ambient R x R^m with m >= {n}, "
            f"got dimension {chart.ambient_dim}"
        )
    steps = finite_difference_steps(chart, config.fd_fraction)
    params = chart.nodes()
    derivs = chart_derivatives(chart, params, steps)
    points = derivs.values
    w, w_prime = metric.values(points[:, 0])
    diagonal = metric.diagonal(points)

    gram = gram_matrices(derivs.first, diagonal)
    dets = checked_gram_determinants(gram, chart, config.min_gram_det)
    frames = orthonormal_frames(derivs.first, gram)
    assert derivs.second is not None
    covariant = covariant_second_derivatives(derivs.first, derivs.second, w, w_prime)
    mean_curvature = mean_curvature_vectors(covariant, gram, frames, diagonal)

    immersion = WarpedImmersion(
        ambient_dim=chart.ambient_dim,
        intrinsic_dim=n,
        points=points,
        tangent_frames=frames,
        mean_curvature=mean_curvature,
        weights=np.sqrt(dets) * chart.cell_volume,
        boundary=sample_boundary(chart, steps, metric.diagonal),
        params=params,
        jacobians=derivs.first,
        induced_metric=gram,
        metric_diagonal=diagonal,
        steps=tuple(float(s) for s in steps),
        metric=metric,
        chart=chart,
    )
    immersion.validate(config.frame_tol, config.normal_tol)
    logger.debug(
        f"Sampled '{chart.name}' in the '{metric.name}' warped product: "
        f"{immersion.size} nodes, volume {immersion.volume:.6g}"
    )
    return immersion


def _lifted_subspace(m: WarpedImmersion, e: Subspace) -> Subspace:
    if e.dim != m.intrinsic_dim:
        raise DimensionMismatchError(
            f"Subspace of dim {e.dim} does not match an immersion of dim {m.intrinsic_dim}"
        )
    if e.ambient_dim == m.ambient_dim - 1:
        return e.padded(1)
    if e.ambient_dim == m.ambient_dim and np.allclose(e.basis[:, 0], 0.0, atol=1e-12):
        return e
    raise DimensionMismatchError(
        f"Subspace in R^{e.ambient_dim} is not inside the R^{m.ambient_dim - 1} factor"
    )


def warped_projection_jacobians(m: WarpedImmersion, e: Subspace) -> np.ndarray:
    """J_E = |det(w(tau) B_E f_i)| over g_N-orthonormal frame rows f_i, in [0, 1]."""
    lifted = _lifted_subspace(m, e)
    q = np.einsum("id,njd->nij", lifted.basis, m.tangent_frames)
    q = m.warping[:, None, None] * q
    return np.clip(np.abs(np.linalg.det(q)), 0.0, 1.0)


def warped_projection_jacobian(m: WarpedImmersion, e: Subspace, index: int) -> float:
    return float(warped_projection_jacobians(m, e)[index])


def full_projection_jacobians(m: WarpedImmersion, e: Subspace) -> np.ndarray:
    """Jacobian of (t, y) -> P_E y from (M, g_N) to Euclidean E: J_E / w^n."""
    return warped_projection_jacobians(m, e) / m.warping**m.intrinsic_dim
