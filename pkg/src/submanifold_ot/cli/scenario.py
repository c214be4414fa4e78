"""Scenario files: versioned JSON documents listing the checks to run."""

import importlib.resources
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from ..errors import ScenarioError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

INEQUALITY_KINDS = (
    "weighted_isoperimetric",
    "weighted_sobolev_l1",
    "classical_isoperimetric",
    "classical_sobolev_l1",
    "lp_sobolev",
    "warped_weighted_isoperimetric",
    "warped_weighted_sobolev_l1",
    "warped_lp_sobolev",
)
TRANSPORT_KINDS = (
    "projection_optimality",
    "composed_optimality",
    "orthogonal_equal_cost",
    "brute_force_equivalence",
    "geodesic_family",
)
GEOMETRY_KINDS = ("laplacian_identity", "warped_reduction", "slice_curvature_law")
CONSTANT_KINDS = ("alpha_constant", "sobolev_constant")
CHECK_KINDS = INEQUALITY_KINDS + TRANSPORT_KINDS + GEOMETRY_KINDS + CONSTANT_KINDS

# Kinds that sample a surface, and the subset that also needs E or a function.
SURFACE_KINDS = INEQUALITY_KINDS + ("laplacian_identity", "warped_reduction")
SUBSPACE_KINDS = tuple(
    k for k in INEQUALITY_KINDS if not k.startswith("classical_")
) + ("warped_reduction",)
FUNCTION_KINDS = tuple(
    k for k in INEQUALITY_KINDS if k.endswith("sobolev_l1") or k.endswith("lp_sobolev")
)
WARPED_KINDS = tuple(k for k in INEQUALITY_KINDS if k.startswith("warped_"))

# Other names under which bundled scenarios can be loaded.
SCENARIO_ALIASES = {"theorem-2-2": "composed-transport"}

_CHECK_KEYS = {
    "kind",
    "name",
    "tolerance",
    "surface",
    "subspace",
    "metric",
    "function",
    "options",
}


@dataclass(frozen=True)
class SurfaceSpec:
    id: str
    params: Dict[str, Any] = field(default_factory=dict)
    resolution: Optional[int] = None


@dataclass(frozen=True)
class SubspaceSpec:
    """Exactly one of ``basis``, ``haar_seed`` and ``tangent_at`` is set."""

    basis: Optional[Tuple[Tuple[float, ...], ...]] = None
    haar_seed: Optional[int] = None
    tangent_at: Optional[int] = None


@dataclass(frozen=True)
class MetricSpec:
    preset: str = "euclidean"
    csv: Optional[str] = None


@dataclass(frozen=True)
class CheckSpec:
    kind: str
    name: str
    tolerance: Optional[float] = None
    surface: Optional[SurfaceSpec] = None
    subspace: Optional[SubspaceSpec] = None
    metric: Optional[MetricSpec] = None
    function: Optional[Dict[str, Any]] = None
    options: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    checks: Tuple[CheckSpec, ...]
    output_dir: Optional[str] = None
    write_csv: Optional[bool] = None
    version: int = SCHEMA_VERSION
    source: Optional[str] = None


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ScenarioError(message)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _parse_surface(data: Any, where: str) -> SurfaceSpec:
    # Imported here so that parsing a scenario does not sample anything.
    from ..geometry.catalog import CATALOG_DEFAULTS

    _require(isinstance(data, dict), f"{where}.surface must be an object")
    surface_id = data.get("id")
    known = set(CATALOG_DEFAULTS) | {"slice"}
    _require(
        surface_id in known,
        f"{where}.surface.id must be one of {sorted(known)}, got {surface_id!r}",
    )
    params = data.get("params", {})
    _require(isinstance(params, dict), f"{where}.surface.params must be an object")
    resolution = data.get("resolution")
    _require(
        resolution is None or (_is_int(resolution) and resolution >= 3),
        f"{where}.surface.resolution must be an integer >= 3",
    )
    return SurfaceSpec(id=surface_id, params=dict(params), resolution=resolution)


def _parse_subspace(data: Any, where: str) -> SubspaceSpec:
    _require(isinstance(data, dict), f"{where}.subspace must be an object")
    given = [k for k in ("basis", "haar", "tangent_at") if k in data]
    _require(
        len(given) == 1,
        f"{where}.subspace needs exactly one of 'basis', 'haar', 'tangent_at'",
    )
    if "basis" in data:
        rows = data["basis"]
        _require(
            isinstance(rows, list)
            and len(rows) > 0
            and all(isinstance(r, list) and all(_is_number(x) for x in r) for r in rows),
            f"{where}.subspace.basis must be a list of numeric rows",
        )
        return SubspaceSpec(basis=tuple(tuple(float(x) for x in r) for r in rows))
    if "haar" in data:
        haar = data["haar"]
        _require(
            isinstance(haar, dict) and _is_int(haar.get("seed")),
            f"{where}.subspace.haar needs an integer seed",
        )
        return SubspaceSpec(haar_seed=haar["seed"])
    index = data["tangent_at"]
    _require(
        _is_int(index) and index >= 0,
        f"{where}.subspace.tangent_at must be a nonnegative point id",
    )
    return SubspaceSpec(tangent_at=index)


def _parse_metric(data: Any, where: str) -> MetricSpec:
    from ..warped.metric import PRESETS

    _require(isinstance(data, dict), f"{where}.metric must be an object")
    preset = data.get("preset", "euclidean")
    _require(
        preset in PRESETS or preset == "custom",
        f"{where}.metric.preset must be one of {sorted(PRESETS)} or 'custom'",
    )
    csv_path = data.get("csv")
    _require(
        preset != "custom" or isinstance(csv_path, str),
        f"{where}.metric.csv is required for the custom metric",
    )
    return MetricSpec(preset=preset, csv=csv_path)


def _parse_check(data: Any, index: int) -> CheckSpec:
    where = f"checks[{index}]"
    _require(isinstance(data, dict), f"{where} must be an object")
    kind = data.get("kind")
    _require(kind in CHECK_KINDS, f"{where}.kind must be one of {list(CHECK_KINDS)}")
    unknown = set(data) - _CHECK_KEYS
    _require(not unknown, f"{where} has unknown keys {sorted(unknown)}")

    name = data.get("name", f"{index:02d}-{kind}")
    _require(
        isinstance(name, str) and name and "/" not in name and not name.startswith("."),
        f"{where}.name must be a plain file name",
    )
    tolerance = data.get("tolerance")
    _require(
        tolerance is None or (_is_number(tolerance) and tolerance > 0),
        f"{where}.tolerance must be positive",
    )
    options = data.get("options", {})
    _require(isinstance(options, dict), f"{where}.options must be an object")

    surface = subspace = metric = function = None
    if kind in SURFACE_KINDS:
        _require("surface" in data, f"{where} ({kind}) needs a surface")
        surface = _parse_surface(data["surface"], where)
        _require(
            surface.id != "slice" or kind in WARPED_KINDS,
            f"{where}: the slice surface only exists in warped products",
        )
    if kind in SUBSPACE_KINDS:
        _require("subspace" in data, f"{where} ({kind}) needs a subspace")
        subspace = _parse_subspace(data["subspace"], where)
    if kind in WARPED_KINDS:
        metric = _parse_metric(data.get("metric", {}), where)
    elif "metric" in data:
        raise ScenarioError(f"{where} ({kind}) does not take a metric")
    if kind in FUNCTION_KINDS:
        function = data.get("function", {"family": "chart_bump"})
        _require(
            isinstance(function, dict) and isinstance(function.get("family"), str),
            f"{where}.function needs a 'family' name",
        )
        function = dict(function)

    return CheckSpec(
        kind=kind,
        name=name,
        tolerance=None if tolerance is None else float(tolerance),
        surface=surface,
        subspace=subspace,
        metric=metric,
        function=function,
        options=dict(options),
    )


def parse_scenario(text: str, source: Optional[str] = None) -> Scenario:
    """Parse and validate a scenario document.

    Raises:
        ScenarioError: Invalid JSON (with line and column) or a schema violation.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"Invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e

    _require(isinstance(data, dict), "A scenario must be a JSON object")
    _require(
        data.get("version") == SCHEMA_VERSION,
        f"Unsupported scenario version {data.get('version')!r}; expected {SCHEMA_VERSION}",
    )
    name = data.get("name")
    _require(isinstance(name, str) and name, "Scenario needs a non-empty 'name'")
    _require(_is_int(data.get("seed")), "Scenario needs an integer 'seed'")

    output = data.get("output", {})
    _require(isinstance(output, dict), "'output' must be an object")
    output_dir = output.get("dir")
    _require(output_dir is None or isinstance(output_dir, str), "output.dir must be a path")
    write_csv = output.get("csv")
    _require(write_csv is None or isinstance(write_csv, bool), "output.csv must be a boolean")

    raw_checks = data.get("checks")
    _require(
        isinstance(raw_checks, list) and len(raw_checks) > 0,
        "Scenario needs a non-empty 'checks' list",
    )
    checks = tuple(_parse_check(c, i) for i, c in enumerate(raw_checks))
    names = [c.name for c in checks]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    _require(not duplicates, f"Duplicate check names {duplicates}")

    return Scenario(
        name=name,
        seed=data["seed"],
        checks=checks,
        output_dir=output_dir,
        write_csv=write_csv,
        source=source,
    )


def bundled_scenarios() -> List[str]:
    """Names of the scenarios shipped with the package."""
    root = importlib.resources.files(__package__).joinpath("scenarios")
    names = {
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    }
    return sorted(names | set(SCENARIO_ALIASES))


def _bundled_text(name: str) -> Optional[str]:
    name = SCENARIO_ALIASES.get(name, name)
    resource = importlib.resources.files(__package__).joinpath(f"scenarios/{name}.json")
    if resource.is_file():
        return resource.read_text(encoding="utf-8")
    return None


def load_scenario(path_or_name: Union[str, Path]) -> Scenario:
    """Load a scenario file, or a bundled scenario by name.

    Raises:
        ScenarioError: The file does not exist or does not parse.
    """
    path = Path(path_or_name)
    if path.is_file():
        logger.info(f"Loading scenario from {path}")
        return parse_scenario(path.read_text(encoding="utf-8"), source=str(path))
    text = _bundled_text(str(path_or_name))
    if text is not None:
        logger.info(f"Loading bundled scenario '{path_or_name}'")
        return parse_scenario(text, source=f"bundled:{path_or_name}")
    raise ScenarioError(
        f"No scenario file '{path_or_name}' and no bundled scenario of that name "
        f"(bundled: {bundled_scenarios()})"
    )
