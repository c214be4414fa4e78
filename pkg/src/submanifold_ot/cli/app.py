import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click

from ..config import AppConfig, load_config
from ..errors import ScenarioError, SobolevSearchError
from ..geometry.catalog import list_catalog
from ..geometry.grassmannian import alpha_constant, alpha_n1, alpha_n1_lower_bound
from ..inequalities.euclidean import isoperimetric_constant, sobolev_constant_closed_form
from ..inequalities.sobolev_constant import sobolev_constant_search
from ..logging_config import setup_logging
from .plotting import plot_reports
from .runner import EXIT_FAILED, EXIT_OK, EXIT_USAGE, run_scenario
from .scenario import bundled_scenarios, load_scenario

logger = logging.getLogger(__name__)


def _echo_json(data: Dict[str, Any]) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _config(ctx: click.Context) -> AppConfig:
    return ctx.obj["config"]


@click.group()
@click.version_option(package_name="submanifold-ot")
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    help="Application config YAML (default: platform config dir, ./config.yaml)",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Override the configured log level",
)
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Log file (default: platform log dir)",
)
@click.pass_context
def main(
    ctx: click.Context,
    config_path: Optional[str] = None,
    log_level: Optional[str] = None,
    log_file: Optional[Path] = None,
) -> None:
    """Optimal transport and weighted isoperimetric checks on submanifolds."""
    overrides = {"log_level": log_level} if log_level else None
    config = load_config(config_path, overrides=overrides)
    setup_logging(config, log_file)
    ctx.obj = {"config": config}


@main.command()
@click.argument("scenario")
@click.option(
    "--output-dir",
    type=click.Path(file_okay=False, path_type=Path),
    help="Report root; SUBMANIFOLD_OT_OUTPUT_DIR takes precedence",
)
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    help="Worker processes (1 runs checks on a single thread)",
)
@click.pass_context
def run(
    ctx: click.Context,
    scenario: str,
    output_dir: Optional[Path] = None,
    workers: Optional[int] = None,
) -> None:
    """Run a scenario file or a bundled scenario by name."""
    config = _config(ctx)
    try:
        parsed = load_scenario(scenario)
    except ScenarioError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_USAGE)

    if output_dir is not None:
        config.output.output_dir = str(output_dir)
    elif parsed.output_dir is not None:
        config.output.output_dir = parsed.output_dir

    try:
        outcome = asyncio.run(run_scenario(parsed, config, workers=workers))
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        ctx.exit(EXIT_FAILED)

    for result in outcome.results:
        click.echo(f"{result.status:6s} {result.kind:32s} {result.name}")
    click.echo(f"Reports written to {outcome.output_dir}")
    if outcome.failures:
        click.echo(
            "Failed checks: " + ", ".join(r.name for r in outcome.failures), err=True
        )
    ctx.exit(outcome.exit_code)


@main.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "-o",
    "--output",
    "svg_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="SVG file to write",
)
@click.pass_context
def plot(ctx: click.Context, csv_path: Path, svg_path: Path) -> None:
    """Plot margins from a reports.csv file."""
    try:
        plot_reports(csv_path, svg_path)
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_USAGE)
    click.echo(f"Wrote {svg_path}")


@main.command(name="catalog")
@click.option("--json", "as_json", is_flag=True, help="Print as JSON")
def catalog_command(as_json: bool) -> None:
    """List catalog surfaces with their default parameters."""
    entries = list_catalog()
    if as_json:
        _echo_json({"surfaces": entries, "scenarios": bundled_scenarios()})
        return
    for entry in entries:
        defaults = ", ".join(f"{k}={v:g}" for k, v in entry["defaults"].items())
        click.echo(f"{entry['name']:12s} {entry['description']}")
        click.echo(f"{'':12s} {defaults}")
    click.echo(f"Bundled scenarios: {', '.join(bundled_scenarios())}")


@main.command()
@click.option("--n", "n", type=click.IntRange(min=2), required=True, help="Plane dimension")
@click.option("--k", "k", type=click.IntRange(min=0), required=True, help="Codimension")
@click.option("--mc", type=click.IntRange(min=1000), help="Monte Carlo sample count")
@click.option("--seed", type=int, help="Seed for the Monte Carlo estimate")
@click.pass_context
def alpha(
    ctx: click.Context, n: int, k: int, mc: Optional[int] = None, seed: Optional[int] = None
) -> None:
    """Grassmannian constant alpha_{n,k}."""
    if mc is not None and seed is None:
        raise click.UsageError("--mc needs an explicit --seed")
    if mc is None and k > 1:
        raise click.UsageError(f"alpha_{{{n},{k}}} has no quadrature form; pass --mc and --seed")

    result: Dict[str, Any] = {"n": n, "k": k}
    if k == 0:
        result["value"] = 1.0
    elif k == 1:
        result["value"] = alpha_n1(n, _config(ctx).inequality.alpha_quadrature_order)
        result["lower_bound"] = alpha_n1_lower_bound(n)
    if mc is not None:
        estimate = alpha_constant(n, k, mc, seed)
        result["monte_carlo"] = estimate.to_dict()
        result.setdefault("value", estimate.value)
    _echo_json(result)


@main.command()
@click.option("--n", "n", type=click.IntRange(min=2), required=True, help="Dimension")
@click.option("--p", "p", type=float, required=True, help="Exponent in (1, n)")
@click.option("--grid", type=click.IntRange(min=2), help="Profile grid points per axis")
@click.pass_context
def constant(ctx: click.Context, n: int, p: float, grid: Optional[int] = None) -> None:
    """Sobolev constant S_{n,p} from the profile search, with the closed form."""
    config = _config(ctx)
    if not 1.0 < p < n:
        raise click.BadParameter(f"p must lie in (1, {n})", param_hint="--p")
    try:
        result = sobolev_constant_search(
            n, p, grid or config.inequality.sobolev_profile_grid, config.inequality
        )
    except SobolevSearchError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_FAILED)
    closed_form = sobolev_constant_closed_form(n, p)
    _echo_json(
        {
            "n": n,
            "p": p,
            "value": result.value,
            "closed_form": closed_form,
            "relative_error": abs(result.value - closed_form) / closed_form,
            "isoperimetric_constant": isoperimetric_constant(n),
            "stationarity": result.stationarity,
            "evaluations": result.evaluations,
        }
    )
    ctx.exit(EXIT_OK)


if __name__ == "__main__":
    sys.exit(main())
