"""SVG margin charts from report CSV files."""

import logging
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from ..inequalities.report import read_report_rows  # noqa: E402

logger = logging.getLogger(__name__)

Row = Dict[str, Any]


def _series_key(row: Row) -> Tuple[str, str]:
    return row["name"], row["surface"]


def _resolution(row: Row) -> float:
    resolution = row["resolution"]
    return float(resolution[0]) if resolution else 0.0


def varying_parameter(rows: List[Row]) -> Optional[str]:
    """First numeric surface parameter taking more than one value, if any."""
    values: Dict[str, set] = defaultdict(set)
    for row in rows:
        for key, value in row["params"].items():
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                values[key].add(float(value))
    for key in sorted(values):
        if key != "resolution" and len(values[key]) > 1:
            return key
    return None


def _grouped(rows: List[Row]) -> Dict[Tuple[str, str], List[Row]]:
    groups: Dict[Tuple[str, str], List[Row]] = defaultdict(list)
    for row in rows:
        groups[_series_key(row)].append(row)
    return dict(sorted(groups.items()))


def plot_reports(csv_path: Union[str, Path], svg_path: Union[str, Path]) -> Path:
    """Draw margin against resolution and against a surface parameter.

    Rows sharing an inequality name and surface form one line. The parameter
    axis uses the first surface parameter that varies, or the row order.

    Raises:
        ValueError: The CSV does not follow the report schema or has no rows.
    """
    rows = read_report_rows(csv_path)
    if not rows:
        raise ValueError(f"{csv_path} contains no reports")
    parameter = varying_parameter(rows)
    groups = _grouped(rows)

    fig, (by_resolution, by_parameter) = plt.subplots(1, 2, figsize=(11, 4.5))
    for (name, surface), series in groups.items():
        label = f"{name} / {surface}"
        ordered = sorted(series, key=_resolution)
        by_resolution.plot(
            [_resolution(r) for r in ordered],
            [r["margin"] for r in ordered],
            marker="o",
            label=label,
        )
        if parameter is None:
            xs = [float(rows.index(r)) for r in series]
            ys = [r["margin"] for r in series]
        else:
            pairs = sorted(
                (float(r["params"][parameter]), r["margin"])
                for r in series
                if parameter in r["params"]
            )
            xs = [x for x, _ in pairs]
            ys = [y for _, y in pairs]
        by_parameter.plot(xs, ys, marker="o", label=label)

    by_resolution.set_xlabel("resolution (samples per axis)")
    by_resolution.set_ylabel("margin (rhs - lhs)")
    by_resolution.set_title("Margin vs resolution")
    by_parameter.set_xlabel(parameter or "report")
    by_parameter.set_ylabel("margin (rhs - lhs)")
    by_parameter.set_title(f"Margin vs {parameter or 'report'}")
    for axes in (by_resolution, by_parameter):
        axes.axhline(0.0, color="grey", linewidth=0.8)
        axes.grid(True, alpha=0.3)
    by_resolution.legend(fontsize="small")
    fig.tight_layout()

    svg_path = Path(svg_path)
    svg_path.parent.mkdir(parents=True, exist_ok=True)
    # A fixed hash salt keeps the SVG element ids stable between runs.
    matplotlib.rcParams["svg.hashsalt"] = "submanifold-ot"
    fig.savefig(svg_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Plotted {len(rows)} reports from {csv_path} to {svg_path}")
    return svg_path
