"""Test functions on sampled immersions.

A test function carries its values, its differential in chart parameters and
the tangential gradient ``J G^{-1} du``. Gradient norms are measured with the
induced metric stored on the immersion, so the same function object works for
Euclidean and warped immersions.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Optional, Protocol, Tuple

import numpy as np

from ..errors import DimensionMismatchError
from ..geometry.immersion import ParametricChart

AmbientFunction = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


class ChartSampled(Protocol):
    points: np.ndarray
    params: np.ndarray
    jacobians: np.ndarray
    induced_metric: np.ndarray
    weights: np.ndarray
    chart: ParametricChart

    @property
    def size(self) -> int: ...


@dataclass(frozen=True)
class TestFunction:
    __test__ = False

    name: str
    values: np.ndarray  # (N,)
    differential: np.ndarray  # (N, n)
    tangential_gradient: np.ndarray  # (N, d)
    gradient_norm: np.ndarray  # (N,)
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values != 0.0)

    def scaled(self, factor: float) -> "TestFunction":
        return replace(
            self,
            values=self.values * factor,
            differential=self.differential * factor,
            tangential_gradient=self.tangential_gradient * factor,
            gradient_norm=self.gradient_norm * abs(factor),
            params={**self.params, "scale": factor * self.params.get("scale", 1.0)},
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.name, **self.params}


def from_differential(
    m: ChartSampled,
    values: np.ndarray,
    differential: np.ndarray,
    name: str,
    params: Optional[Dict[str, Any]] = None,
) -> TestFunction:
    values = np.asarray(values, dtype=float)
    differential = np.asarray(differential, dtype=float)
    n = m.params.shape[1]
    if values.shape != (m.size,) or differential.shape != (m.size, n):
        raise DimensionMismatchError(
            f"Test function shapes {values.shape}, {differential.shape} do not fit "
            f"{m.size} points of dimension {n}"
        )
    raised = np.linalg.solve(m.induced_metric, differential[..., None])[..., 0]
    gradient = np.einsum("nda,na->nd", m.jacobians, raised)
    norm_sq = np.einsum("na,na->n", differential, raised)
    return TestFunction(
        name=name,
        values=values,
        differential=differential,
        tangential_gradient=gradient,
        gradient_norm=np.sqrt(np.clip(norm_sq, 0.0, None)),
        params=dict(params or {}),
    )


def from_ambient(
    m: ChartSampled,
    fn: AmbientFunction,
    name: str = "custom",
    params: Optional[Dict[str, Any]] = None,
) -> TestFunction:
    """Restrict an ambient function; ``fn`` returns (values, ambient gradients)."""
    values, ambient_gradient = fn(m.points)
    differential = np.einsum("nda,nd->na", m.jacobians, ambient_gradient)
    return from_differential(m, values, differential, name, params)


def smooth_step(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1. Returns (value, derivative)."""
    t = np.asarray(t, dtype=float)
    inner = (t > 0.0) & (t < 1.0)
    tc = np.clip(t, 0.002, 0.998)
    a = np.exp(-1.0 / tc)
    b = np.exp(-1.0 / (1.0 - tc))
    da = a / tc**2
    db = -b / (1.0 - tc) ** 2
    value = np.where(t >= 1.0, 1.0, np.where(inner, a / (a + b), 0.0))
    derivative = np.where(inner, (da * b - a * db) / (a + b) ** 2, 0.0)
    return value, derivative


def _default_center(m: ChartSampled) -> np.ndarray:
    centroid = m.weights @ m.points / m.weights.sum()
    nearest = int(np.argmin(np.linalg.norm(m.points - centroid, axis=1)))
    return m.points[nearest]


def radial_bump(
    m: ChartSampled, center: Optional[np.ndarray] = None, radius: float = 0.5
) -> TestFunction:
    """exp(1 - 1/(1 - s^2)) with s = |x - center| / radius, zero for s >= 1."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    c = _default_center(m) if center is None else np.asarray(center, dtype=float)

    def bump(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        offset = points - c
        s_sq = np.einsum("nd,nd->n", offset, offset) / radius**2
        inside = s_sq < 1.0
        gap = np.where(inside, 1.0 - s_sq, 1.0)
        value = np.where(inside, np.exp(1.0 - 1.0 / gap), 0.0)
        factor = np.where(inside, -2.0 * value / (gap**2 * radius**2), 0.0)
        return value, factor[:, None] * offset

    return from_ambient(
        m, bump, "radial_bump", {"center": c.tolist(), "radius": float(radius)}
    )


def smoothed_indicator(
    m: ChartSampled,
    center: Optional[np.ndarray] = None,
    radius: float = 0.8,
    width: float = 0.1,
) -> TestFunction:
    """1 on the ball of radius ``radius - width``, 0 outside ``radius``."""
    if not 0 < width < radius:
        raise ValueError(f"Need 0 < width < radius, got width={width}, radius={radius}")
    c = _default_center(m) if center is None else np.asarray(center, dtype=float)

    def indicator(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        offset = points - c
        r = np.linalg.norm(offset, axis=1)
        value, slope = smooth_step((radius - r) / width)
        safe_r = np.where(r > 0.0, r, 1.0)
        gradient = (-slope / (width * safe_r))[:, None] * offset
        return value, gradient

    return from_ambient(
        m,
        indicator,
        "smoothed_indicator",
        {"center": c.tolist(), "radius": float(radius), "width": float(width)},
    )


def chart_bump(m: ChartSampled, collar: float = 0.15) -> TestFunction:
    """Product of smooth cutoffs over the declared boundary faces.

    Each cutoff is zero within ``collar / 2`` of its face and one beyond
    ``collar``, distances measured as fractions of the parameter range.
    """
    if not 0 < collar < 0.5:
        raise ValueError(f"collar must lie in (0, 0.5), got {collar}")
    chart = m.chart
    n = chart.intrinsic_dim
    factors = []
    slopes = []
    axes = []
    for axis, side in chart.boundary_faces:
        lo, hi = chart.domain[axis]
        frac = (m.params[:, axis] - lo) / (hi - lo)
        dist = frac if side == 0 else 1.0 - frac
        half = 0.5 * collar
        value, slope = smooth_step((dist - half) / half)
        factors.append(value)
        slopes.append(slope * (1.0 if side == 0 else -1.0) / (half * (hi - lo)))
        axes.append(axis)

    values = np.ones(m.size)
    for factor in factors:
        values = values * factor
    differential = np.zeros((m.size, n))
    for i, (slope, axis) in enumerate(zip(slopes, axes)):
        others = np.ones(m.size)
        for j, factor in enumerate(factors):
            if j != i:
                others = others * factor
        differential[:, axis] += slope * others
    return from_differential(m, values, differential, "chart_bump", {"collar": float(collar)})


def boundary_collar_violation(m: ChartSampled, u: TestFunction) -> float:
    """Largest |u| on the cells touching a declared boundary face."""
    chart = m.chart
    if not chart.boundary_faces:
        return 0.0
    index = np.unravel_index(np.arange(m.size), chart.resolution)
    touching = np.zeros(m.size, dtype=bool)
    for axis, side in chart.boundary_faces:
        edge = 0 if side == 0 else chart.resolution[axis] - 1
        touching |= index[axis] == edge
    return float(np.abs(u.values[touching]).max(initial=0.0))


FAMILIES: Dict[str, Callable[..., TestFunction]] = {
    "radial_bump": radial_bump,
    "smoothed_indicator": smoothed_indicator,
    "chart_bump": chart_bump,
}


def make_test_function(m: ChartSampled, family: str, **params: Any) -> TestFunction:
    """Build a named test function family on ``m``."""
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"Unknown test function family '{family}'; choose from {sorted(FAMILIES)}"
        ) from None
    return builder(m, **params)

