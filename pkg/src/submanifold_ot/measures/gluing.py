"""Gluing of two plans over a shared middle measure, and composition."""

import logging

import numpy as np

from ..errors import MarginalMismatchError
from .discrete import MARGINAL_TOL, TransferencePlan, TripleCoupling

logger = logging.getLogger(__name__)


def glue(
    rho12: TransferencePlan, rho23: TransferencePlan, tol: float = MARGINAL_TOL
) -> TripleCoupling:
    """Conditionally independent gluing over the middle measure.

    Mass on (i, j, k) is rho12(i, j) * rho23(j, k) / mu2(j). The middle
    measures are matched by atom index, not by geometric proximity.

    Raises:
        MarginalMismatchError: rho12.target and rho23.source differ.
    """
    middle = rho12.target
    deviation = middle.same_as(rho23.source)
    if deviation > tol:
        raise MarginalMismatchError(
            "Middle measures of the glued plans disagree", deviation
        )

    order12 = np.argsort(rho12.dst, kind="stable")
    order23 = np.argsort(rho23.src, kind="stable")
    dst_sorted = rho12.dst[order12]
    src_sorted = rho23.src[order23]
    bounds12 = np.searchsorted(dst_sorted, np.arange(middle.size + 1))
    bounds23 = np.searchsorted(src_sorted, np.arange(middle.size + 1))

    ids = []
    masses = []
    for j in range(middle.size):
        left = order12[bounds12[j] : bounds12[j + 1]]
        right = order23[bounds23[j] : bounds23[j + 1]]
        if len(left) == 0 or len(right) == 0:
            continue
        outer = np.outer(rho12.mass[left], rho23.mass[right]) / middle.masses[j]
        ii, kk = np.meshgrid(rho12.src[left], rho23.dst[right], indexing="ij")
        ids.append(np.stack([ii.ravel(), np.full(ii.size, j), kk.ravel()], axis=1))
        masses.append(outer.ravel())

    gamma = TripleCoupling(
        measures=(rho12.source, middle, rho23.target),
        ids=np.concatenate(ids),
        mass=np.concatenate(masses),
    )
    logger.debug(
        f"Glued plans with {rho12.support_size} and {rho23.support_size} support "
        f"entries into {len(gamma.mass)} triples"
    )
    return gamma


def compose(gamma: TripleCoupling) -> TransferencePlan:
    """The (1, 3) marginal of a triple coupling."""
    return gamma.marginal(0, 2)
