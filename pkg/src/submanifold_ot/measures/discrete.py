"""Discrete measures, transference plans and triple couplings.

Plans are stored sparsely as parallel arrays (src, dst, mass); dense
matrices are only built on request for small instances.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..errors import DimensionMismatchError, MarginalMismatchError
from ..geometry.grassmannian import Subspace, projection_jacobians
from ..geometry.immersion import SampledImmersion

logger = logging.getLogger(__name__)

MERGE_TOL = 1e-12
MARGINAL_TOL = 1e-10

PointMap = Callable[[np.ndarray], np.ndarray]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class DiscreteMeasure:
    atoms: np.ndarray  # (m, d)
    masses: np.ndarray  # (m,)

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        masses = np.array(self.masses, dtype=float)
        if atoms.ndim != 2 or masses.ndim != 1 or len(atoms) != len(masses):
            raise DimensionMismatchError(
                f"Atoms {atoms.shape} and masses {masses.shape} do not match"
            )
        if len(atoms) == 0:
            raise ValueError("A measure needs at least one atom")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("Atoms must be finite")
        if not (np.all(np.isfinite(masses)) and np.all(masses > 0)):
            raise ValueError("Masses must be positive and finite")
        object.__setattr__(self, "atoms", _readonly(atoms))
        object.__setattr__(self, "masses", _readonly(masses))

    @classmethod
    def from_points(
        cls, atoms: np.ndarray, masses: Optional[np.ndarray] = None
    ) -> "DiscreteMeasure":
        """Probability measure on ``atoms``, uniform unless masses are given."""
        atoms = np.atleast_2d(np.asarray(atoms, dtype=float))
        if masses is None:
            masses = np.full(len(atoms), 1.0 / len(atoms))
        masses = np.asarray(masses, dtype=float)
        return cls(atoms, masses / masses.sum())

    @property
    def size(self) -> int:
        return len(self.masses)

    @property
    def dim(self) -> int:
        return int(self.atoms.shape[1])

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def normalized(self) -> "DiscreteMeasure":
        return DiscreteMeasure(self.atoms, self.masses / self.masses.sum())

    def is_uniform(self) -> bool:
        return bool(np.ptp(self.masses) <= 1e-15 * self.masses.max())

    def second_moment(self) -> float:
        return float(self.masses @ np.einsum("md,md->m", self.atoms, self.atoms))

    def same_as(self, other: "DiscreteMeasure") -> float:
        """Max deviation of atoms and masses, compared index by index."""
        if self.atoms.shape != other.atoms.shape:
            return float("inf")
        return float(
            max(
                np.abs(self.atoms - other.atoms).max(),
                np.abs(self.masses - other.masses).max(),
            )
        )


def merge_atoms(
    points: np.ndarray, masses: np.ndarray, tol: float = MERGE_TOL
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Merge points closer than ``tol``.

    Returns:
        (atoms, masses, labels): each merged atom sits at the lowest-index
        member of its group, groups are ordered by that index, and
        ``labels[i]`` is the merged id of input point i.
    """
    points = np.asarray(points, dtype=float)
    pairs = cKDTree(points).query_pairs(r=tol, output_type="ndarray")
    count = len(points)
    if len(pairs) == 0:
        return points.copy(), np.asarray(masses, dtype=float).copy(), np.arange(count)
    adjacency = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(count, count)
    )
    _, components = connected_components(adjacency, directed=False)
    _, first, inverse = np.unique(components, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    labels = rank[inverse]
    merged_masses = np.bincount(labels, weights=masses, minlength=len(order))
    return points[first[order]], merged_masses, labels


def push_forward_with_labels(
    mu: DiscreteMeasure, point_map: PointMap, tol: float = MERGE_TOL
) -> Tuple[DiscreteMeasure, np.ndarray]:
    images = np.asarray(point_map(mu.atoms), dtype=float)
    if images.ndim != 2 or len(images) != mu.size:
        raise DimensionMismatchError(
            f"Map returned shape {images.shape} for {mu.size} atoms"
        )
    atoms, masses, labels = merge_atoms(images, mu.masses, tol)
    return DiscreteMeasure(atoms, masses), labels


def push_forward(
    mu: DiscreteMeasure, point_map: PointMap, tol: float = MERGE_TOL
) -> DiscreteMeasure:
    """Image measure; images within ``tol`` of each other are merged."""
    return push_forward_with_labels(mu, point_map, tol)[0]


def _aggregate(
    first: np.ndarray, second: np.ndarray, mass: np.ndarray, second_size: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    keys = first.astype(np.int64) * second_size + second.astype(np.int64)
    unique, inverse = np.unique(keys, return_inverse=True)
    summed = np.bincount(inverse, weights=mass)
    return unique // second_size, unique % second_size, summed


@dataclass(frozen=True)
class TransferencePlan:
    """Coupling of ``source`` and ``target`` given by its support list."""

    source: DiscreteMeasure
    target: DiscreteMeasure
    src: np.ndarray
    dst: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        src = np.array(self.src, dtype=np.int64)
        dst = np.array(self.dst, dtype=np.int64)
        mass = np.array(self.mass, dtype=float)
        if not (src.shape == dst.shape == mass.shape) or src.ndim != 1:
            raise DimensionMismatchError("Support arrays must be 1-D and aligned")
        if len(src) and (
            src.min() < 0
            or src.max() >= self.source.size
            or dst.min() < 0
            or dst.max() >= self.target.size
        ):
            raise ValueError("Support ids out of range")
        if not np.all(mass > 0):
            raise ValueError("Support masses must be positive")
        object.__setattr__(self, "src", _readonly(src))
        object.__setattr__(self, "dst", _readonly(dst))
        object.__setattr__(self, "mass", _readonly(mass))
        validate_plan(self)

    @classmethod
    def from_dense(
        cls,
        source: DiscreteMeasure,
        target: DiscreteMeasure,
        matrix: np.ndarray,
        threshold: float = 0.0,
    ) -> "TransferencePlan":
        matrix = np.asarray(matrix, dtype=float)
        src, dst = np.nonzero(matrix > threshold)
        return cls(source, target, src, dst, matrix[src, dst])

    @property
    def support_size(self) -> int:
        return len(self.mass)

    def source_marginal(self) -> np.ndarray:
        return np.bincount(self.src, weights=self.mass, minlength=self.source.size)

    def target_marginal(self) -> np.ndarray:
        return np.bincount(self.dst, weights=self.mass, minlength=self.target.size)

    def dense(self, limit: int = 1000) -> np.ndarray:
        if max(self.source.size, self.target.size) > limit:
            raise ValueError(
                f"Refusing to build a dense {self.source.size}x{self.target.size} "
                f"matrix (limit {limit})"
            )
        out = np.zeros((self.source.size, self.target.size))
        np.add.at(out, (self.src, self.dst), self.mass)
        return out

    def support_points(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.source.atoms[self.src], self.target.atoms[self.dst]


def validate_plan(rho: TransferencePlan, tol: float = MARGINAL_TOL) -> float:
    """Check both marginals; returns the max deviation or raises."""
    deviation = float(
        max(
            np.abs(rho.source_marginal() - rho.source.masses).max(),
            np.abs(rho.target_marginal() - rho.target.masses).max(),
        )
    )
    if deviation > tol:
        raise MarginalMismatchError("Plan marginals do not match its measures", deviation)
    return deviation


def plan_cost(rho: TransferencePlan) -> float:
    """Quadratic transport cost: sum of mass * |x_i - y_j|^2."""
    x, y = rho.support_points()
    diff = x - y
    return float(rho.mass @ np.einsum("kd,kd->k", diff, diff))


def identity_plan(mu: DiscreteMeasure) -> TransferencePlan:
    ids = np.arange(mu.size)
    return TransferencePlan(mu, mu, ids, ids, mu.masses.copy())


def plan_from_map(
    mu: DiscreteMeasure, point_map: PointMap, tol: float = MERGE_TOL
) -> TransferencePlan:
    """The deterministic plan (Id x T)_# mu."""
    target, labels = push_forward_with_labels(mu, point_map, tol)
    return TransferencePlan(mu, target, np.arange(mu.size), labels, mu.masses.copy())


def support_lemma_check(rho: TransferencePlan) -> bool:
    """Every source atom with positive mass occurs in the support."""
    covered = np.zeros(rho.source.size, dtype=bool)
    covered[rho.src] = True
    return bool(np.all(covered[rho.source.masses > 0]))


@dataclass(frozen=True)
class TripleCoupling:
    """Coupling of three measures; ids[:, i] indexes ``measures[i]``."""

    measures: Tuple[DiscreteMeasure, DiscreteMeasure, DiscreteMeasure]
    ids: np.ndarray  # (K, 3)
    mass: np.ndarray  # (K,)

    def __post_init__(self):
        ids = np.array(self.ids, dtype=np.int64).reshape(-1, 3)
        mass = np.array(self.mass, dtype=float)
        if len(ids) != len(mass):
            raise DimensionMismatchError("Support ids and masses do not align")
        if not np.all(mass > 0):
            raise ValueError("Support masses must be positive")
        for axis, measure in enumerate(self.measures):
            if len(ids) and (ids[:, axis].min() < 0 or ids[:, axis].max() >= measure.size):
                raise ValueError(f"Support ids out of range on factor {axis}")
        object.__setattr__(self, "measures", tuple(self.measures))
        object.__setattr__(self, "ids", _readonly(ids))
        object.__setattr__(self, "mass", _readonly(mass))

    def marginal(self, i: int, j: int) -> TransferencePlan:
        """Push-forward under the projection onto factors (i, j)."""
        first, second, mass = _aggregate(
            self.ids[:, i], self.ids[:, j], self.mass, self.measures[j].size
        )
        return TransferencePlan(self.measures[i], self.measures[j], first, second, mass)

    def validate(self, tol: float = MARGINAL_TOL) -> float:
        return max(
            validate_plan(self.marginal(i, j), tol) for i, j in ((0, 1), (1, 2), (0, 2))
        )


def immersion_measure(
    m: SampledImmersion,
    density: Union[None, np.ndarray, PointMap] = None,
    e: Optional[Subspace] = None,
    eps: float = 1e-8,
) -> DiscreteMeasure:
    """Probability measure with masses density * dv_M at the sampled points.

    When ``e`` is given the density is zeroed on the critical set of the
    projection onto ``e`` and those atoms are dropped.
    """
    if density is None:
        values = np.ones(m.size)
    elif callable(density):
        values = np.asarray(density(m.points), dtype=float)
    else:
        values = np.asarray(density, dtype=float)
    if values.shape != (m.size,) or np.any(values < 0):
        raise ValueError("Density must be a nonnegative value per sampled point")
    masses = values * m.weights
    if e is not None:
        masses = np.where(projection_jacobians(m, e) <= eps, 0.0, masses)
    keep = masses > 0
    if not keep.any():
        raise ValueError("Density vanishes on every sampled point")
    return DiscreteMeasure.from_points(m.points[keep], masses[keep])

