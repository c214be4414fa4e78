"""Inequality reports and their JSON/CSV forms."""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

REPORT_KEYS = (
    "name",
    "lhs",
    "rhs",
    "margin",
    "relative_margin",
    "surface",
    "params",
    "resolution",
    "constants",
    "flags",
)

CSV_COLUMNS = REPORT_KEYS


@dataclass(frozen=True)
class InequalityReport:
    """Both sides of one inequality evaluated on one sampled surface.

    ``margin`` is rhs - lhs, so a holding inequality has a nonnegative margin.
    """

    name: str
    lhs: float
    rhs: float
    surface: str
    params: Dict[str, Any] = field(default_factory=dict)
    resolution: Tuple[int, ...] = ()
    constants: Dict[str, float] = field(default_factory=dict)
    flags: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))
        object.__setattr__(self, "resolution", tuple(int(r) for r in self.resolution))
        values = [self.lhs, self.rhs, *self.constants.values()]
        if not all(math.isfinite(float(v)) for v in values):
            raise ValueError(f"Report '{self.name}' has non-finite entries")
        if self.rhs <= 0:
            raise ValueError(
                f"Report '{self.name}' needs a positive right-hand side, got {self.rhs}"
            )

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def relative_margin(self) -> float:
        return self.margin / self.rhs

    def holds(self, tolerance: float = 1e-6) -> bool:
        return self.relative_margin >= -tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "relative_margin": self.relative_margin,
            "surface": self.surface,
            "params": dict(self.params),
            "resolution": list(self.resolution),
            "constants": {k: float(v) for k, v in self.constants.items()},
            "flags": dict(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def csv_row(self) -> Dict[str, str]:
        data = self.to_dict()
        row = {}
        for key in CSV_COLUMNS:
            value = data[key]
            if isinstance(value, (dict, list)):
                row[key] = json.dumps(value, sort_keys=True)
            elif isinstance(value, float):
                row[key] = repr(value)
            else:
                row[key] = str(value)
        return row


def write_reports_csv(
    reports: Iterable[InequalityReport], path: Union[str, Path]
) -> Path:
    """One row per report; structured fields are JSON-encoded."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(CSV_COLUMNS))
        writer.writeheader()
        for report in reports:
            writer.writerow(report.csv_row())
    return path


def read_report_rows(path: Union[str, Path]) -> List[Dict[str, Any]]:
    """Parse a report CSV back into dicts with numeric and JSON fields decoded.

    Raises:
        ValueError: The header does not match the report schema.
    """
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        header: Sequence[str] = reader.fieldnames or []
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"{path} is not a report CSV (missing columns {missing})")
        rows = []
        for raw in reader:
            row: Dict[str, Any] = dict(raw)
            for key in ("lhs", "rhs", "margin", "relative_margin"):
                row[key] = float(raw[key])
            for key in ("params", "resolution", "constants", "flags"):
                row[key] = json.loads(raw[key])
            rows.append(row)
    return rows
