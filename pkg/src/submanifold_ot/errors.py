"""Domain errors. Every error is a ValueError so callers may catch broadly."""

from typing import Optional, Sequence, Tuple


class DegenerateMetricError(ValueError):
    """Induced metric is (numerically) singular at a grid cell."""

    def __init__(self, cell: Tuple[int, ...], gram_det: float):
        self.cell = cell
        self.gram_det = gram_det
        super().__init__(
            f"Degenerate induced metric at cell {cell}: det G = {gram_det:.3e}"
        )


class NonFiniteMapError(ValueError):
    """Chart map returned NaN or inf."""

    def __init__(self, node: Sequence[float]):
        self.node = tuple(float(x) for x in node)
        super().__init__(f"Chart map is not finite at parameters {self.node}")


class DimensionMismatchError(ValueError):
    pass


class MarginalMismatchError(ValueError):
    def __init__(self, message: str, max_deviation: float):
        self.max_deviation = max_deviation
        super().__init__(f"{message} (max deviation {max_deviation:.3e})")


class SolverLimitError(ValueError):
    def __init__(self, source_atoms: int, target_atoms: int, limit: int):
        self.source_atoms = source_atoms
        self.target_atoms = target_atoms
        self.limit = limit
        super().__init__(
            f"Instance with {source_atoms} x {target_atoms} atoms exceeds the "
            f"solver limit of {limit} atoms per side"
        )


class IterationLimitError(ValueError):
    """Network simplex still hit its iteration cap after every retry."""

    def __init__(self, iterations: int, passes: int):
        self.iterations = iterations
        self.passes = passes
        super().__init__(
            f"Network simplex did not converge within {iterations} iterations "
            f"after {passes} passes"
        )


class InfeasibleTransportError(ValueError):
    pass


class ExhaustiveSearchTooLargeError(ValueError):
    def __init__(self, candidates: int, limit: int):
        self.candidates = candidates
        self.limit = limit
        super().__init__(
            f"Exhaustive cycle search needs {candidates} candidate cycles "
            f"(limit {limit}); use mode='sampled'"
        )


class CriticalSupportError(ValueError):
    """Support of a test function meets the critical set of the projection."""

    def __init__(self, point_ids: Sequence[int], floor: float):
        self.point_ids = [int(i) for i in point_ids]
        self.floor = floor
        shown = self.point_ids[:10]
        more = "" if len(self.point_ids) <= 10 else f" (+{len(self.point_ids) - 10})"
        super().__init__(
            f"Projection Jacobian below {floor:g} on the support at points "
            f"{shown}{more}"
        )


class MissingBoundaryError(ValueError):
    pass


class ScenarioError(ValueError):
    """Scenario file could not be parsed or validated."""

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None
    ):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class SobolevSearchError(ValueError):
    """Profile search for the Sobolev constant did not reach a stationary point."""

    def __init__(self, message: str, trace: Sequence[Tuple[Tuple[float, ...], float]]):
        self.trace = list(trace)
        super().__init__(f"{message} after {len(self.trace)} evaluations")
