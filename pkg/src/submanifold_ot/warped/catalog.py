"""Charts in R x R^{n+k}: slices and Euclidean catalog surfaces lifted to a height."""

from typing import Any

import numpy as np

from ..geometry.catalog import catalog
from ..geometry.immersion import ParametricChart


def warped_slice_chart(
    t0: float = 0.0,
    half_width: float = 0.5,
    n: int = 2,
    k: int = 1,
    resolution: int = 32,
) -> ParametricChart:
    """Square piece of the slice {t0} x span(e_1..e_n), every face a boundary."""
    if n < 2 or k < 0:
        raise ValueError(f"warped slice needs n >= 2 and k >= 0, got n={n}, k={k}")
    if half_width <= 0:
        raise ValueError(f"half_width must be positive, got {half_width}")

    def surface(params: np.ndarray) -> np.ndarray:
        out = np.zeros((len(params), 1 + n + k))
        out[:, 0] = t0
        out[:, 1 : n + 1] = params
        return out

    return ParametricChart(
        domain=((-half_width, half_width),) * n,
        map=surface,
        resolution=resolution,
        ambient_dim=1 + n + k,
        boundary_faces=tuple((a, s) for a in range(n) for s in (0, 1)),
        name="warped-slice",
        params={"t0": t0, "half_width": half_width, "n": n, "k": k},
    )


def warped_catalog(
    name: str, t_offset: float = 0.0, t_tilt: float = 0.0, **params: Any
) -> ParametricChart:
    """Lift a catalog chart X into R x R^{n+k} as (t_offset + t_tilt * X_1, X).

    ``name`` may also be "slice", which builds :func:`warped_slice_chart`.
    """
    if name in ("slice", "warped-slice"):
        return warped_slice_chart(t0=t_offset, **params)
    base = catalog(name, **params)
    inner = base.map

    def lifted(values: np.ndarray) -> np.ndarray:
        x = np.asarray(inner(values), dtype=float)
        return np.hstack([(t_offset + t_tilt * x[:, 0])[:, None], x])

    return ParametricChart(
        domain=base.domain,
        map=lifted,
        resolution=base.resolution,
        ambient_dim=base.ambient_dim + 1,
        boundary_faces=base.boundary_faces,
        name=base.name,
        params={**base.params, "t_offset": t_offset, "t_tilt": t_tilt},
    )
