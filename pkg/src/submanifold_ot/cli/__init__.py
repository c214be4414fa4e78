"""Command line scenario runner."""

from .app import main
from .checks import CheckResult, run_check
from .plotting import plot_reports
from .runner import ScenarioOutcome, run_scenario, write_outputs
from .scenario import Scenario, bundled_scenarios, load_scenario, parse_scenario

__all__ = [
    "CheckResult",
    "Scenario",
    "ScenarioOutcome",
    "bundled_scenarios",
    "load_scenario",
    "main",
    "parse_scenario",
    "plot_reports",
    "run_check",
    "run_scenario",
    "write_outputs",
]
