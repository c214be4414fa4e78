"""Numerical estimate of the sharp L^p Sobolev constant of R^n from its dual
characterization as a supremum over trial profiles v with ||v||_{np/(n-p)} = 1:

    S = n(n-p)/(p(n-1)) * sup  int v^(p(n-1)/(n-p))
                               / (int |y|^(p/(p-1)) v^(np/(n-p)))^((p-1)/p)

Trial profiles are radial, v(r) = (1 + (r/L)^s)^(-beta) * (1 + c x) with
x = (r/L)^s / (1 + (r/L)^s). The substitution r -> x maps every radial
integral to a Jacobi-weighted integral on [0, 1], evaluated with QUADPACK's
algebraic-weight rule.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

from ..config import InequalityConfig
from ..errors import SobolevSearchError
from .euclidean import check_sobolev_exponent, critical_exponent, unit_ball_volume

logger = logging.getLogger(__name__)

Trace = List[Tuple[Tuple[float, ...], float]]

FD_STEP = 1e-5


@dataclass(frozen=True)
class RadialProfile:
    shape: float  # s
    decay: float  # beta
    perturbation: float = 0.0  # c, greater than -1
    scale: float = 1.0  # L

    def __post_init__(self):
        if self.shape <= 0 or self.decay <= 0 or self.scale <= 0:
            raise ValueError(f"Invalid radial profile {self}")
        if self.perturbation <= -1:
            raise ValueError(f"perturbation must exceed -1, got {self.perturbation}")

    def __call__(self, r: np.ndarray) -> np.ndarray:
        t = (np.asarray(r, dtype=float) / self.scale) ** self.shape
        x = t / (1.0 + t)
        return (1.0 + t) ** (-self.decay) * (1.0 + self.perturbation * x)

    def dilated(self, factor: float) -> "RadialProfile":
        return RadialProfile(self.shape, self.decay, self.perturbation, self.scale * factor)

    @classmethod
    def extremal(cls, n: int, p: float) -> "RadialProfile":
        """(1 + |y|^(p/(p-1)))^(-(n-p)/p), the known maximizer."""
        check_sobolev_exponent(n, p)
        return cls(shape=p / (p - 1.0), decay=(n - p) / p)


def radial_integral(
    n: int, profile: RadialProfile, power: float, moment: float = 0.0
) -> float:
    """int over R^n of |y|^moment v(|y|)^power dy."""
    s, beta, c, scale = profile.shape, profile.decay, profile.perturbation, profile.scale
    head = (n + moment) / s - 1.0
    tail = power * beta - (n + moment) / s - 1.0
    if tail <= -1.0:
        raise ValueError(
            f"Profile decays too slowly: |y|^{moment} v^{power} is not integrable"
        )
    value, _ = quad(
        lambda x: (1.0 + c * x) ** power,
        0.0,
        1.0,
        weight="alg",
        wvar=(head, tail),
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    return n * unit_ball_volume(n) * scale ** (n + moment) / s * value


def sobolev_dual_functional(n: int, p: float, profile: RadialProfile) -> float:
    """The normalized dual ratio for one trial profile.

    It is invariant under v -> t v and under dilations, so no explicit
    normalization of ``profile`` is needed.
    """
    check_sobolev_exponent(n, p)
    conjugate = p / (p - 1.0)
    exponent = critical_exponent(n, p)
    numerator = radial_integral(n, profile, p * (n - 1) / (n - p))
    moment = radial_integral(n, profile, exponent, conjugate)
    norm = radial_integral(n, profile, exponent) ** (1.0 / exponent)
    ratio = numerator / (moment ** (1.0 / conjugate) * norm)
    return n * (n - p) / (p * (n - 1)) * ratio


def _profile_from(theta: Sequence[float], n: int, p: float) -> RadialProfile:
    # theta = (log s/p', eta, log(1 + c)); beta keeps the moment integrable.
    sigma, eta, gamma = theta
    conjugate = p / (p - 1.0)
    shape = conjugate * math.exp(sigma)
    decay = (n + conjugate) / (shape * critical_exponent(n, p)) * (1.0 + math.exp(eta))
    return RadialProfile(shape=shape, decay=decay, perturbation=math.expm1(gamma))


def _extremal_eta(n: int, p: float) -> float:
    conjugate = p / (p - 1.0)
    return math.log((n * (conjugate - 1.0) - conjugate) / (n + conjugate))


@dataclass(frozen=True)
class SobolevSearchResult:
    value: float
    profile: RadialProfile
    stationarity: float
    evaluations: int
    trace: Trace = field(default_factory=list, repr=False)


def sobolev_constant_search(
    n: int,
    p: float,
    profile_grid: int = 7,
    config: Optional[InequalityConfig] = None,
) -> SobolevSearchResult:
    """Maximize the dual ratio over the profile family.

    A ``profile_grid``-per-axis grid around the extremal shape seeds a
    Nelder-Mead search. The result is accepted when the central-difference
    gradient at the maximizer is below ``sobolev_stationarity_tol`` relative
    to the value.

    Raises:
        SobolevSearchError: The search stopped away from a stationary point.
    """
    config = config or InequalityConfig()
    check_sobolev_exponent(n, p)
    if profile_grid < 2:
        raise ValueError(f"profile_grid must be at least 2, got {profile_grid}")
    trace: Trace = []

    def objective(theta: Sequence[float]) -> float:
        try:
            value = sobolev_dual_functional(n, p, _profile_from(theta, n, p))
        except (ValueError, OverflowError):
            value = -math.inf
        trace.append((tuple(float(t) for t in theta), value))
        return value

    eta0 = _extremal_eta(n, p)
    offsets = np.linspace(-1.0, 1.0, profile_grid)
    grid = itertools.product(offsets, eta0 + offsets, 0.5 * offsets)
    start = max(grid, key=lambda theta: objective(theta))

    result = minimize(
        lambda theta: -objective(theta),
        np.asarray(start, dtype=float),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 4000},
    )
    theta = result.x
    value = -float(result.fun)

    gradient = np.empty(3)
    for i in range(3):
        step = np.zeros(3)
        step[i] = FD_STEP
        gradient[i] = (objective(theta + step) - objective(theta - step)) / (2 * FD_STEP)
    stationarity = float(np.abs(gradient).max()) / max(1.0, abs(value))
    if not (math.isfinite(value) and stationarity <= config.sobolev_stationarity_tol):
        raise SobolevSearchError(
            f"Profile search for n={n}, p={p} ended at {value:.10g} with "
            f"gradient {stationarity:.3e}",
            trace,
        )
    logger.info(
        f"Sobolev constant n={n}, p={p}: {value:.10g} "
        f"({len(trace)} evaluations, stationarity {stationarity:.2e})"
    )
    return SobolevSearchResult(
        value=value,
        profile=_profile_from(theta, n, p),
        stationarity=stationarity,
        evaluations=len(trace),
        trace=trace,
    )


def sobolev_constant(
    n: int,
    p: float,
    profile_grid: Optional[int] = None,
    config: Optional[InequalityConfig] = None,
) -> float:
    """Best value of the dual ratio found over the profile family.

    It is a lower bound for the sharp constant and attains it up to the
    stationarity tolerance, because the family contains the maximizer.
    """
    config = config or InequalityConfig()
    grid = config.sobolev_profile_grid if profile_grid is None else profile_grid
    return sobolev_constant_search(n, p, grid, config).value
