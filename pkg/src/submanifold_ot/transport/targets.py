"""Uniform discrete measures on the unit ball of a subspace."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..geometry.grassmannian import SeedLike, Subspace
from ..inequalities.euclidean import unit_ball_volume
from ..measures.discrete import DiscreteMeasure

logger = logging.getLogger(__name__)

MIN_ATOMS = 10
_REJECTION_BATCH = 4096


@dataclass(frozen=True)
class BallTarget:
    subspace: Subspace
    measure: DiscreteMeasure
    mode: str
    spacing: Optional[float] = None

    @property
    def atoms(self) -> np.ndarray:
        """Ambient coordinates of the atoms."""
        return self.measure.atoms

    @property
    def coordinates(self) -> np.ndarray:
        """Atoms in the orthonormal basis of the subspace."""
        return self.subspace.coordinates(self.measure.atoms)

    @property
    def size(self) -> int:
        return self.measure.size

    def axis_second_moments(self) -> np.ndarray:
        """Mean of y_i^2 per axis; 1/(n+2) for the uniform ball."""
        return self.measure.masses @ self.coordinates**2


def _grid_points(n: int, spacing: float) -> np.ndarray:
    half = int(math.ceil(1.0 / spacing))
    axis = spacing * (np.arange(-half, half) + 0.5)
    mesh = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    return mesh[np.einsum("md,md->m", mesh, mesh) <= 1.0]


def _rejection_points(n: int, num_atoms: int, seed: SeedLike) -> np.ndarray:
    rng = np.random.default_rng(seed)
    accepted = []
    count = 0
    while count < num_atoms:
        cube = rng.uniform(-1.0, 1.0, size=(_REJECTION_BATCH, n))
        inside = cube[np.einsum("md,md->m", cube, cube) <= 1.0]
        accepted.append(inside)
        count += len(inside)
    return np.concatenate(accepted)[:num_atoms]


def ball_target(
    e: Subspace,
    num_atoms: Optional[int] = None,
    seed: SeedLike = None,
    mode: Optional[str] = None,
    spacing: Optional[float] = None,
) -> BallTarget:
    """Uniform atoms in the closed unit ball of ``e``.

    Args:
        e: The subspace.
        num_atoms: Number of atoms; in grid mode it sets the spacing to
            (omega_n / num_atoms)^(1/n) unless ``spacing`` is given.
        seed: Required in random mode.
        mode: "grid" (cell centres h(i + 1/2) inside the ball) or "random"
            (rejection sampling from the cube). Defaults to grid up to
            dimension 3 and random above.
        spacing: Grid spacing h.

    Raises:
        ValueError: Fewer than 10 atoms requested, a missing seed in random
            mode or an unknown mode.
    """
    n = e.dim
    mode = mode or ("grid" if n <= 3 else "random")
    if num_atoms is not None and num_atoms < MIN_ATOMS:
        raise ValueError(f"A ball target needs at least {MIN_ATOMS} atoms, got {num_atoms}")

    if mode == "grid":
        if spacing is None:
            if num_atoms is None:
                raise ValueError("Grid mode needs num_atoms or spacing")
            spacing = (unit_ball_volume(n) / num_atoms) ** (1.0 / n)
        if spacing <= 0:
            raise ValueError(f"spacing must be positive, got {spacing}")
        coords = _grid_points(n, spacing)
        if len(coords) == 0:
            raise ValueError(f"Spacing {spacing} leaves no grid point in the ball")
    elif mode == "random":
        if num_atoms is None:
            raise ValueError("Random mode needs num_atoms")
        if seed is None:
            raise ValueError("Random mode needs an explicit seed")
        coords = _rejection_points(n, num_atoms, seed)
        spacing = None
    else:
        raise ValueError(f"Unknown ball target mode '{mode}'")

    logger.debug(f"Ball target in a {n}-plane: {len(coords)} atoms ({mode})")
    return BallTarget(
        subspace=e,
        measure=DiscreteMeasure.from_points(e.embed(coords)),
        mode=mode,
        spacing=spacing,
    )
