"""Catalog of parametric surfaces used by the checks and the CLI."""

import math
from typing import Any, Callable, Dict, List

import numpy as np

from ..errors import DimensionMismatchError
from .immersion import ParametricChart

CATALOG_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "flat-disc": {"radius": 1.0, "n": 2, "k": 1, "tilt": 0.0, "resolution": 64},
    "sphere-cap": {"theta_max": math.pi / 3, "radius": 1.0, "resolution": 64},
    "graph": {
        "amplitude": 0.3,
        "half_width": 1.0,
        "n": 2,
        "k": 1,
        "resolution": 64,
    },
    "catenoid": {"height": 1.0, "resolution": 64},
    "torus-patch": {
        "R": 2.0,
        "r": 0.5,
        "u_span": math.pi / 2,
        "v_span": math.pi,
        "resolution": 64,
    },
}

CATALOG_DESCRIPTIONS: Dict[str, str] = {
    "flat-disc": "n-ball of given radius in span(e1..en), tilted toward e_{n+1}",
    "sphere-cap": "cap of the round 2-sphere around +e3; theta_max=pi is the sphere",
    "graph": "graph of a*sin(x1)*cos(x2)...cos(xn) over a cube, in R^{n+k}",
    "catenoid": "(cosh v cos u, cosh v sin u, v), |v| <= height",
    "torus-patch": "patch of the torus of radii R, r",
}


def _hyperspherical(params: np.ndarray) -> np.ndarray:
    """(r, theta_1..theta_{n-2}, phi) -> Cartesian coordinates in R^n."""
    r = params[:, 0]
    angles = params[:, 1:]
    n = params.shape[1]
    out = np.empty_like(params)
    running = r.copy()
    for i in range(n - 1):
        out[:, i] = running * np.cos(angles[:, i])
        running = running * np.sin(angles[:, i])
    out[:, n - 1] = running
    return out


def flat_disc(
    radius: float = 1.0, n: int = 2, k: int = 1, tilt: float = 0.0, resolution: int = 64
) -> ParametricChart:
    if n < 2:
        raise ValueError("flat-disc needs n >= 2")
    if tilt != 0.0 and k < 1:
        raise DimensionMismatchError("A tilted disc needs codimension k >= 1")
    d = n + k
    c, s = math.cos(tilt), math.sin(tilt)

    def disc(params: np.ndarray) -> np.ndarray:
        flat = _hyperspherical(params)
        out = np.zeros((len(params), d))
        out[:, :n] = flat
        if k >= 1:
            last = flat[:, n - 1]
            out[:, n - 1] = c * last
            out[:, n] = s * last
        return out

    domain = [(0.0, radius)] + [(0.0, math.pi)] * (n - 2) + [(0.0, 2 * math.pi)]
    return ParametricChart(
        domain=tuple(domain),
        map=disc,
        resolution=resolution,
        ambient_dim=d,
        boundary_faces=((0, 1),),
        name="flat-disc",
        params={"radius": radius, "n": n, "k": k, "tilt": tilt},
    )


def sphere_cap(
    theta_max: float = math.pi / 3, radius: float = 1.0, resolution: int = 64
) -> ParametricChart:
    if not 0.0 < theta_max <= math.pi:
        raise ValueError(f"theta_max must lie in (0, pi], got {theta_max}")

    def cap(params: np.ndarray) -> np.ndarray:
        theta, phi = params[:, 0], params[:, 1]
        return radius * np.stack(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)],
            axis=1,
        )

    faces = () if theta_max >= math.pi else ((0, 1),)
    return ParametricChart(
        domain=((0.0, theta_max), (0.0, 2 * math.pi)),
        map=cap,
        resolution=resolution,
        ambient_dim=3,
        boundary_faces=faces,
        name="sphere-cap",
        params={"theta_max": theta_max, "radius": radius},
    )


def graph(
    amplitude: float = 0.3,
    half_width: float = 1.0,
    n: int = 2,
    k: int = 1,
    resolution: int = 64,
) -> ParametricChart:
    if n < 2 or k < 1:
        raise ValueError("graph needs n >= 2 and k >= 1")

    def surface(params: np.ndarray) -> np.ndarray:
        height = amplitude * np.sin(params[:, 0])
        for i in range(1, n):
            height = height * np.cos(params[:, i])
        out = np.zeros((len(params), n + k))
        out[:, :n] = params
        out[:, n] = height
        return out

    faces = tuple((a, s) for a in range(n) for s in (0, 1))
    return ParametricChart(
        domain=((-half_width, half_width),) * n,
        map=surface,
        resolution=resolution,
        ambient_dim=n + k,
        boundary_faces=faces,
        name="graph",
        params={"amplitude": amplitude, "half_width": half_width, "n": n, "k": k},
    )


def catenoid(height: float = 1.0, resolution: int = 64) -> ParametricChart:
    def surface(params: np.ndarray) -> np.ndarray:
        u, v = params[:, 0], params[:, 1]
        return np.stack([np.cosh(v) * np.cos(u), np.cosh(v) * np.sin(u), v], axis=1)

    return ParametricChart(
        domain=((0.0, 2 * math.pi), (-height, height)),
        map=surface,
        resolution=resolution,
        ambient_dim=3,
        boundary_faces=((1, 0), (1, 1)),
        name="catenoid",
        params={"height": height},
    )


def torus_patch(
    R: float = 2.0,
    r: float = 0.5,
    u_span: float = math.pi / 2,
    v_span: float = math.pi,
    resolution: int = 64,
) -> ParametricChart:
    if not R > r > 0:
        raise ValueError(f"torus-patch needs R > r > 0, got R={R}, r={r}")

    def surface(params: np.ndarray) -> np.ndarray:
        u, v = params[:, 0], params[:, 1]
        ring = R + r * np.cos(v)
        return np.stack([ring * np.cos(u), ring * np.sin(u), r * np.sin(v)], axis=1)

    return ParametricChart(
        domain=((0.0, u_span), (-v_span / 2, v_span / 2)),
        map=surface,
        resolution=resolution,
        ambient_dim=3,
        boundary_faces=((0, 0), (0, 1), (1, 0), (1, 1)),
        name="torus-patch",
        params={"R": R, "r": r, "u_span": u_span, "v_span": v_span},
    )


_BUILDERS: Dict[str, Callable[..., ParametricChart]] = {
    "flat-disc": flat_disc,
    "sphere-cap": sphere_cap,
    "graph": graph,
    "catenoid": catenoid,
    "torus-patch": torus_patch,
}


def catalog(name: str, **params: Any) -> ParametricChart:
    """Build a catalog chart; unknown names or parameters raise ValueError."""
    if name not in _BUILDERS:
        raise ValueError(f"Unknown surface '{name}'. Known: {sorted(_BUILDERS)}")
    unknown = set(params) - set(CATALOG_DEFAULTS[name])
    if unknown:
        raise ValueError(f"Unknown parameters for '{name}': {sorted(unknown)}")
    return _BUILDERS[name](**params)


def list_catalog() -> List[Dict[str, Any]]:
    return [
        {
            "name": name,
            "description": CATALOG_DESCRIPTIONS[name],
            "defaults": dict(CATALOG_DEFAULTS[name]),
        }
        for name in _BUILDERS
    ]
