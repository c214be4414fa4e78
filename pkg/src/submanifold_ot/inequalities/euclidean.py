"""Euclidean constants: unit-ball volumes, the isoperimetric constant and the
closed form of the sharp L^p Sobolev constant."""

import math
from functools import lru_cache

from scipy.special import gammaln


@lru_cache(maxsize=None)
def unit_ball_volume(n: int) -> float:
    """omega_n from omega_n = 2 pi / n * omega_{n-2}, omega_0 = 1, omega_1 = 2."""
    if n < 0:
        raise ValueError(f"Dimension must be nonnegative, got {n}")
    if n == 0:
        return 1.0
    if n == 1:
        return 2.0
    return 2.0 * math.pi / n * unit_ball_volume(n - 2)


def isoperimetric_constant(n: int) -> float:
    """n * omega_n^(1/n), the sharp constant of the Euclidean inequality."""
    if n < 1:
        raise ValueError(f"Dimension must be positive, got {n}")
    return n * unit_ball_volume(n) ** (1.0 / n)


def critical_exponent(n: int, p: float) -> float:
    """np / (n - p)."""
    check_sobolev_exponent(n, p)
    return n * p / (n - p)


def check_sobolev_exponent(n: int, p: float) -> None:
    if n < 2:
        raise ValueError(f"Sobolev inequalities need n >= 2, got {n}")
    if not 1.0 < p < n:
        raise ValueError(f"p must lie in (1, {n}), got {p}")


def sobolev_constant_closed_form(n: int, p: float) -> float:
    """Sharp constant in S ||u||_{np/(n-p)} <= ||grad u||_p on R^n.

    Uses the known value attained by (1 + |y|^(p/(p-1)))^(-(n-p)/p); it tends
    to n omega_n^(1/n) as p -> 1.
    """
    check_sobolev_exponent(n, p)
    log_gamma = (
        gammaln(n / p)
        + gammaln(1.0 + n - n / p)
        - gammaln(1.0 + n / 2.0)
        - gammaln(float(n))
    )
    return float(
        math.sqrt(math.pi)
        * n ** (1.0 / p)
        * ((n - p) / (p - 1.0)) ** ((p - 1.0) / p)
        * math.exp(log_gamma / n)
    )
