"""Cyclical monotonicity certificates for finite plans.

A plan with support pairs (x_i, y_i) is c-cyclically monotone when no cyclic
reassignment i -> s(i) lowers sum c(x_i, y_s(i)) below sum c(x_i, y_i). For
finite measures this is equivalent to optimality.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import NegativeCycleError, bellman_ford, csgraph_from_dense
from scipy.spatial.distance import cdist

from ..errors import ExhaustiveSearchTooLargeError
from .discrete import TransferencePlan

logger = logging.getLogger(__name__)

FULL_EXHAUSTION_SIZE = 8
BATCH = 65_536
GRAPH_LIMIT = 4000


@dataclass(frozen=True)
class MonotonicityCertificate:
    is_monotone: bool
    mode: str
    cycles_checked: int
    graph_checked: bool = False
    violating_cycle: Optional[Tuple[int, ...]] = None
    violating_pairs: List[Tuple[int, int]] = field(default_factory=list)
    improvement: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_monotone": self.is_monotone,
            "mode": self.mode,
            "cycles_checked": self.cycles_checked,
            "graph_checked": self.graph_checked,
            "violating_cycle": (
                list(self.violating_cycle) if self.violating_cycle is not None else None
            ),
            "improvement": self.improvement,
        }


def candidate_cycle_count(support_size: int, max_len: int) -> int:
    """Number of distinct cycles of length 2..max_len on support_size entries."""
    return sum(
        math.perm(support_size, m) // m
        for m in range(2, min(max_len, support_size) + 1)
    )


def _cycles(support_size: int, length: int) -> Iterator[Tuple[int, ...]]:
    # Fixing the smallest index first removes rotations of the same cycle.
    for first in range(support_size):
        for rest in itertools.permutations(range(first + 1, support_size), length - 1):
            yield (first,) + rest


def _worst(
    costs: np.ndarray, diagonal: np.ndarray, cycles: np.ndarray
) -> Tuple[int, float]:
    successors = np.roll(cycles, -1, axis=1)
    improvement = diagonal[cycles].sum(axis=1) - costs[cycles, successors].sum(axis=1)
    best = int(np.argmax(improvement))
    return best, float(improvement[best])


def _violation(
    rho: TransferencePlan,
    mode: str,
    checked: int,
    cycle: Tuple[int, ...],
    improvement: float,
    graph_checked: bool = False,
) -> MonotonicityCertificate:
    pairs = [(int(rho.src[i]), int(rho.dst[i])) for i in cycle]
    logger.info(
        f"Plan is not cyclically monotone: cycle {cycle} improves cost by {improvement:.3e}"
    )
    return MonotonicityCertificate(
        is_monotone=False,
        mode=mode,
        cycles_checked=checked,
        graph_checked=graph_checked,
        violating_cycle=tuple(int(i) for i in cycle),
        violating_pairs=pairs,
        improvement=improvement,
    )


def _random_cycles(
    costs: np.ndarray,
    diagonal: np.ndarray,
    min_len: int,
    count: int,
    seed: int,
    tol: float,
) -> Tuple[int, Optional[Tuple[Tuple[int, ...], float]]]:
    size = len(diagonal)
    if min_len > size or count <= 0:
        return 0, None
    rng = np.random.default_rng(seed)
    lengths = rng.integers(min_len, size + 1, size=count)
    best: Optional[Tuple[Tuple[int, ...], float]] = None
    for length in np.unique(lengths):
        rows = int(np.count_nonzero(lengths == length))
        shuffled = rng.permuted(np.tile(np.arange(size), (rows, 1)), axis=1)
        cycles = shuffled[:, : int(length)]
        index, improvement = _worst(costs, diagonal, cycles)
        if improvement > tol and (best is None or improvement > best[1]):
            best = (tuple(int(i) for i in cycles[index]), improvement)
    return count, best


def _has_negative_cycle(costs: np.ndarray, diagonal: np.ndarray, tol: float) -> bool:
    """Negative-cycle test on w(i -> j) = c(x_i, y_j) - c(x_j, y_j) + tol / S."""
    size = len(diagonal)
    weights = costs - diagonal[None, :] + tol / size
    np.fill_diagonal(weights, np.inf)
    graph = csgraph_from_dense(weights, null_value=np.inf)
    try:
        bellman_ford(graph, directed=True, indices=0)
    except NegativeCycleError:
        return True
    return False


def is_cyclically_monotone(
    rho: TransferencePlan,
    max_cycle_len: int = 6,
    tol: float = 1e-12,
    mode: str = "exhaustive",
    random_cycles: int = 10_000,
    seed: int = 0,
    exhaustive_limit: int = 1_000_000,
) -> MonotonicityCertificate:
    """Certify c-cyclical monotonicity of a plan's support.

    ``exhaustive`` enumerates every cycle up to ``max_cycle_len`` (every cycle
    at all when the support has at most 8 entries) and then tries
    ``random_cycles`` longer random cycles. ``sampled`` tries all 2-cycles,
    the random cycles and a Bellman-Ford negative-cycle test on the complete
    support graph; that test flags cycles of length L improving the cost by
    more than L * tol / S.

    Raises:
        ExhaustiveSearchTooLargeError: exhaustive mode would enumerate more
            than ``exhaustive_limit`` cycles.
    """
    if tol < 0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"Unknown mode '{mode}'")
    size = rho.support_size
    if mode == "sampled" and size > GRAPH_LIMIT:
        raise ValueError(f"Support of {size} entries exceeds the graph check limit")

    x, y = rho.support_points()
    costs = cdist(x, y, "sqeuclidean")
    diagonal = np.diag(costs).copy()
    checked = 0

    if mode == "exhaustive":
        max_len = size if size <= FULL_EXHAUSTION_SIZE else min(max_cycle_len, size)
        total = candidate_cycle_count(size, max_len)
        if total > exhaustive_limit:
            raise ExhaustiveSearchTooLargeError(total, exhaustive_limit)
        for length in range(2, max_len + 1):
            generator = _cycles(size, length)
            while True:
                batch = list(itertools.islice(generator, BATCH))
                if not batch:
                    break
                cycles = np.array(batch, dtype=np.int64)
                best, improvement = _worst(costs, diagonal, cycles)
                if improvement > tol:
                    return _violation(
                        rho, mode, checked + best + 1, tuple(batch[best]), improvement
                    )
                checked += len(batch)
        extra, found = _random_cycles(
            costs, diagonal, max_len + 1, random_cycles, seed, tol
        )
        checked += extra
        if found is not None:
            return _violation(rho, mode, checked, found[0], found[1])
        logger.debug(f"Exhaustive certificate: {checked} cycles, no violation")
        return MonotonicityCertificate(True, mode, checked)

    # sampled mode
    if size >= 2:
        swap = costs + costs.T
        improvement = diagonal[:, None] + diagonal[None, :] - swap
        upper = improvement.copy()
        upper[np.tril_indices(size)] = -np.inf
        i, j = np.unravel_index(int(np.argmax(upper)), upper.shape)
        checked += size * (size - 1) // 2
        if upper[i, j] > tol:
            return _violation(rho, mode, checked, (int(i), int(j)), float(upper[i, j]))
    extra, found = _random_cycles(costs, diagonal, 3, random_cycles, seed, tol)
    checked += extra
    if found is not None:
        return _violation(rho, mode, checked, found[0], found[1])
    if size >= 2 and _has_negative_cycle(costs, diagonal, tol):
        logger.info("Plan is not cyclically monotone: negative cycle in support graph")
        return MonotonicityCertificate(
            is_monotone=False, mode=mode, cycles_checked=checked, graph_checked=True
        )
    logger.debug(f"Sampled certificate: {checked} cycles plus graph check, no violation")
    return MonotonicityCertificate(True, mode, checked, graph_checked=size >= 2)
