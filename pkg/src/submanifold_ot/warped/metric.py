"""Warping functions w(t) for the metric dt^2 + w(t)^2 |dy|^2 on R x R^m."""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

ScalarFn = Callable[[np.ndarray], np.ndarray]

PRESETS: Dict[str, Tuple[ScalarFn, ScalarFn]] = {
    "euclidean": (lambda t: np.ones_like(t), lambda t: np.zeros_like(t)),
    "hyperbolic": (np.exp, np.exp),
    "cosh": (np.cosh, np.sinh),
    "quadratic": (lambda t: 1.0 + t**2, lambda t: 2.0 * t),
    "sine": (lambda t: 2.0 + np.sin(t), np.cos),
}


@dataclass(frozen=True)
class WarpedMetric:
    name: str
    w: ScalarFn
    w_prime: ScalarFn
    t_range: Tuple[float, float] = (-math.inf, math.inf)
    params: Dict[str, str] = field(default_factory=dict)

    def values(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(w, w') at ``t``.

        Raises:
            ValueError: t leaves the tabulated range or w is not positive.
        """
        t = np.asarray(t, dtype=float)
        lo, hi = self.t_range
        if t.size and (t.min() < lo or t.max() > hi):
            raise ValueError(
                f"t in [{t.min():.4g}, {t.max():.4g}] leaves the range [{lo}, {hi}] "
                f"of metric '{self.name}'"
            )
        w = np.asarray(self.w(t), dtype=float)
        if not np.all(w > 0):
            raise ValueError(f"Warping function of '{self.name}' is not positive")
        return w, np.asarray(self.w_prime(t), dtype=float)

    def diagonal(self, points: np.ndarray) -> np.ndarray:
        """Diagonal of g_N at ambient points (t, y): [1, w^2, ..., w^2]."""
        w, _ = self.values(points[:, 0])
        diag = np.ones_like(points)
        diag[:, 1:] = (w**2)[:, None]
        return diag

    def derivative_error(self, t: np.ndarray, h: float = 1e-5) -> float:
        """max |w' - (w(t+h) - w(t-h)) / 2h| over ``t``."""
        t = np.asarray(t, dtype=float)
        central = (self.w(t + h) - self.w(t - h)) / (2.0 * h)
        return float(np.abs(self.w_prime(t) - central).max())


def warped_metric(preset: str = "euclidean") -> WarpedMetric:
    """One of the analytic presets: euclidean, hyperbolic, cosh, quadratic, sine."""
    try:
        w, w_prime = PRESETS[preset]
    except KeyError:
        raise ValueError(
            f"Unknown metric preset '{preset}'; choose from {sorted(PRESETS)} or 'custom'"
        ) from None
    return WarpedMetric(name=preset, w=w, w_prime=w_prime)


def custom_metric(path: Union[str, Path]) -> WarpedMetric:
    """Metric tabulated in a CSV with columns t, w, w_prime, linearly interpolated."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {"t", "w", "w_prime"} <= set(reader.fieldnames):
            raise ValueError(f"{path} needs columns t, w, w_prime")
        rows = [(float(r["t"]), float(r["w"]), float(r["w_prime"])) for r in reader]
    if len(rows) < 2:
        raise ValueError(f"{path} needs at least two rows")
    table = np.array(sorted(rows))
    t, w, w_prime = table[:, 0], table[:, 1], table[:, 2]
    if np.any(np.diff(t) <= 0):
        raise ValueError(f"{path} repeats t values")
    if np.any(w <= 0):
        raise ValueError(f"{path} has nonpositive w values")
    logger.debug(f"Loaded warping table {path} on [{t[0]}, {t[-1]}] ({len(t)} rows)")
    return WarpedMetric(
        name="custom",
        w=lambda s: np.interp(s, t, w),
        w_prime=lambda s: np.interp(s, t, w_prime),
        t_range=(float(t[0]), float(t[-1])),
        params={"csv": str(path)},
    )


def resolve_metric(preset: str, csv_path: Optional[Union[str, Path]] = None) -> WarpedMetric:
    if preset == "custom":
        if csv_path is None:
            raise ValueError("The custom metric needs a CSV table")
        return custom_metric(csv_path)
    return warped_metric(preset)
