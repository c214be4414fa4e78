"""Subspaces, plane cosines and the Grassmannian averages alpha_{n,k}."""

import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Optional, Sequence, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from ..errors import DimensionMismatchError
from .immersion import SampledImmersion

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, None]

# Samples per Monte Carlo chunk; each chunk draws from its own child seed.
MC_CHUNK = 20_000


@dataclass(frozen=True)
class Subspace:
    """An n-plane through the origin, stored as n orthonormal rows."""

    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[0] > basis.shape[1] or basis.shape[0] < 1:
            raise DimensionMismatchError(
                f"Subspace basis must be an (n, d) array with n <= d, got {basis.shape}"
            )
        err = float(np.abs(basis @ basis.T - np.eye(basis.shape[0])).max())
        if err > 1e-12:
            raise ValueError(f"Subspace basis is not orthonormal (error {err:.2e})")
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[1])

    @classmethod
    def coordinate(cls, ambient_dim: int, axes: Sequence[int]) -> "Subspace":
        """span(e_i for i in axes)."""
        return cls(np.eye(ambient_dim)[list(axes)])

    @classmethod
    def from_vectors(cls, vectors: np.ndarray) -> "Subspace":
        """Orthonormalize the rows of ``vectors`` (positive-diagonal QR)."""
        vectors = np.asarray(vectors, dtype=float)
        q, r = np.linalg.qr(vectors.T)
        signs = np.sign(np.diag(r))
        signs[signs == 0] = 1.0
        return cls((q * signs).T)

    @classmethod
    def haar(cls, ambient_dim: int, n: int, seed: SeedLike) -> "Subspace":
        return cls(haar_plane_sample(ambient_dim, n, seed))

    def coordinates(self, points: np.ndarray) -> np.ndarray:
        """Coordinates of P_E x in the basis, shape (N, n)."""
        return np.asarray(points, dtype=float) @ self.basis.T

    def embed(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(coords, dtype=float) @ self.basis

    def project(self, points: np.ndarray) -> np.ndarray:
        """Orthogonal projection P_E in ambient coordinates."""
        return self.embed(self.coordinates(points))

    def padded(self, leading: int = 1) -> "Subspace":
        """The same plane inside R^leading x R^d."""
        return Subspace(
            np.hstack([np.zeros((self.dim, leading)), self.basis])
        )


def _orthonormal_rows(vectors: np.ndarray, name: str) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=float)
    err = float(np.abs(vectors @ vectors.T - np.eye(vectors.shape[0])).max())
    if err > 1e-10:
        raise ValueError(f"{name} is not orthonormal (error {err:.2e})")
    return vectors


def plane_cosine(f_basis: np.ndarray, e: Subspace) -> float:
    """K_E(F) = |det(B_F B_E^T)|, the volume cosine between two n-planes."""
    f = _orthonormal_rows(f_basis, "Plane basis")
    if f.shape != e.basis.shape:
        raise DimensionMismatchError(
            f"Plane of shape {f.shape} cannot be compared with {e.basis.shape}"
        )
    return float(min(1.0, abs(np.linalg.det(f @ e.basis.T))))


def _positive_qr(gaussian: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(gaussian)
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs[signs == 0] = 1.0
    return q * signs[..., None, :]


def haar_plane_sample(ambient_dim: int, n: int, seed: SeedLike) -> np.ndarray:
    """n orthonormal rows spanning a Haar-distributed n-plane in R^ambient_dim."""
    if not 1 <= n <= ambient_dim:
        raise DimensionMismatchError(
            f"Cannot sample a {n}-plane in R^{ambient_dim}"
        )
    rng = np.random.default_rng(seed)
    q = _positive_qr(rng.standard_normal((ambient_dim, n)))
    return q.T


@dataclass(frozen=True)
class AlphaEstimate:
    value: float
    standard_error: float
    num_samples: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "standard_error": self.standard_error,
            "num_samples": self.num_samples,
        }


def alpha_constant(
    n: int,
    k: int,
    num_samples: int,
    seed: SeedLike,
    reference: Optional[np.ndarray] = None,
) -> AlphaEstimate:
    """Monte Carlo average of K_F(E)^{1/n} over Haar-random E.

    The sample count is split into fixed chunks, each drawn from a child of
    ``SeedSequence(seed)``, so the estimate does not depend on how chunks are
    scheduled.

    Args:
        n: Plane dimension, at least 2.
        k: Codimension, at least 0.
        num_samples: At least 1000.
        seed: Seed for the sample stream.
        reference: Rows of the fixed plane F; span(e_1..e_n) by default.
    """
    if n < 2 or k < 0:
        raise ValueError(f"alpha_constant needs n >= 2 and k >= 0, got n={n}, k={k}")
    if num_samples < 1000:
        raise ValueError(f"num_samples must be at least 1000, got {num_samples}")
    if k == 0:
        return AlphaEstimate(value=1.0, standard_error=0.0, num_samples=num_samples)

    d = n + k
    ref = np.eye(d)[:n] if reference is None else _orthonormal_rows(reference, "F")
    if ref.shape != (n, d):
        raise DimensionMismatchError(f"Reference plane must have shape {(n, d)}")

    num_chunks = math.ceil(num_samples / MC_CHUNK)
    children = np.random.SeedSequence(seed).spawn(num_chunks)
    total = 0.0
    total_sq = 0.0
    remaining = num_samples
    for child in children:
        size = min(MC_CHUNK, remaining)
        remaining -= size
        rng = np.random.default_rng(child)
        q = _positive_qr(rng.standard_normal((size, d, n)))
        cosines = np.abs(np.linalg.det(np.einsum("id,mdj->mij", ref, q)))
        values = np.minimum(cosines, 1.0) ** (1.0 / n)
        total += float(values.sum())
        total_sq += float((values**2).sum())

    mean = total / num_samples
    variance = max(total_sq / num_samples - mean**2, 0.0)
    se = math.sqrt(variance * num_samples / (num_samples - 1) / num_samples)
    logger.debug(f"alpha({n},{k}) ~ {mean:.6f} +/- {se:.2e} from {num_samples} samples")
    return AlphaEstimate(value=mean, standard_error=se, num_samples=num_samples)


def wallis_integral(m: int) -> float:
    """Integral of sin^m over [0, pi]."""
    return float(math.sqrt(math.pi) * math.exp(gammaln((m + 1) / 2) - gammaln(m / 2 + 1)))


def _half_integral(n: int, quadrature_order: int, side: float) -> float:
    # r = pi/2 + side * t^n; |cos r|^{1/n} is smooth in t.
    nodes, weights = leggauss(quadrature_order)
    upper = (math.pi / 2) ** (1.0 / n)
    t = 0.5 * upper * (nodes + 1.0)
    r = math.pi / 2 + side * t**n
    integrand = (
        np.abs(np.cos(r)) ** (1.0 / n) * np.sin(r) ** (n - 1) * n * t ** (n - 1)
    )
    return float(0.5 * upper * weights @ integrand)


def alpha_n1(n: int, quadrature_order: int = 256) -> float:
    """alpha_{n,1} = int |cos r|^{1/n} sin^{n-1} r dr / int sin^{n-1} r dr on [0, pi].

    Both halves [0, pi/2] and [pi/2, pi] are integrated separately with
    Gauss-Legendre, the cosine singularity sitting at the shared endpoint.
    """
    if n < 2:
        raise ValueError(f"alpha_n1 needs n >= 2, got {n}")
    lower_half = _half_integral(n, quadrature_order, -1.0)
    upper_half = _half_integral(n, quadrature_order, 1.0)
    nodes, weights = leggauss(quadrature_order)
    r = 0.5 * math.pi * (nodes + 1.0)
    denominator = float(0.5 * math.pi * weights @ np.sin(r) ** (n - 1))
    return (lower_half + upper_half) / denominator


def alpha_n1_lower_bound(n: int) -> float:
    """cos^{1/n}(pi/2 - 1/n) * (1 - (1/(2n)) / W_{n-1})."""
    if n < 2:
        raise ValueError(f"alpha_n1_lower_bound needs n >= 2, got {n}")
    return math.cos(math.pi / 2 - 1.0 / n) ** (1.0 / n) * (
        1.0 - (1.0 / (2 * n)) / wallis_integral(n - 1)
    )


def _check_dims(m: SampledImmersion, e: Subspace) -> None:
    if e.dim != m.intrinsic_dim or e.ambient_dim != m.ambient_dim:
        raise DimensionMismatchError(
            f"Subspace of dim {e.dim} in R^{e.ambient_dim} does not match an "
            f"immersion of dim {m.intrinsic_dim} in R^{m.ambient_dim}"
        )


def projection_jacobians(m: SampledImmersion, e: Subspace) -> np.ndarray:
    """J_E at every node, |det(B_E B_T^T)| clipped to [0, 1]."""
    _check_dims(m, e)
    q = np.einsum("id,njd->nij", e.basis, m.tangent_frames)
    return np.clip(np.abs(np.linalg.det(q)), 0.0, 1.0)


def projection_jacobian(m: SampledImmersion, e: Subspace, index: int) -> float:
    _check_dims(m, e)
    q = e.basis @ m.tangent_frames[index].T
    return float(min(1.0, abs(np.linalg.det(q))))


def critical_set(m: SampledImmersion, e: Subspace, eps: float = 1e-8) -> FrozenSet[int]:
    """Ids of nodes where the projection onto E fails to be onto: J_E <= eps."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    jac = projection_jacobians(m, e)
    return frozenset(int(i) for i in np.flatnonzero(jac <= eps))
