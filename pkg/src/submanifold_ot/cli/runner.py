"""Asynchronous scenario runner.

Checks are CPU-bound, so each one runs in an executor; results come back in
declaration order whatever order the workers finish in.
"""

import asyncio
import concurrent.futures
import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional

import filelock

from ..config import AppConfig
from ..inequalities.report import write_reports_csv
from .checks import CheckResult, run_check
from .scenario import Scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

LOCK_TIMEOUT = 30.0


@dataclass(frozen=True)
class ScenarioOutcome:
    scenario: str
    results: List[CheckResult]
    output_dir: Path

    @property
    def exit_code(self) -> int:
        return exit_code(self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]


def exit_code(results: List[CheckResult]) -> int:
    """0 when every check passed, 1 otherwise."""
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _executor(workers: Optional[int]) -> concurrent.futures.Executor:
    if workers == 1:
        return concurrent.futures.ThreadPoolExecutor(max_workers=1)
    return concurrent.futures.ProcessPoolExecutor(max_workers=workers)


@contextmanager
def _report_lock(directory: Path) -> Iterator[None]:
    """Serialize report writing between concurrent runs into one directory."""
    lock = filelock.FileLock(str(directory / ".reports.lock"), timeout=LOCK_TIMEOUT)
    try:
        with lock:
            yield
    except filelock.Timeout:
        logger.error(f"Could not lock {directory} within {LOCK_TIMEOUT}s")
        raise


def write_outputs(
    scenario: Scenario, results: List[CheckResult], root: Path, write_csv: bool
) -> Path:
    """Write one JSON per check, reports.csv and summary.json under root/<scenario>."""
    directory = root / scenario.name
    directory.mkdir(parents=True, exist_ok=True)
    with _report_lock(directory):
        for result in results:
            (directory / f"{result.name}.json").write_text(
                result.to_json() + "\n", encoding="utf-8"
            )
        reports = [r.report for r in results if r.report is not None]
        if write_csv and reports:
            write_reports_csv(reports, directory / "reports.csv")
        summary = {
            "scenario": scenario.name,
            "seed": scenario.seed,
            "exit_code": exit_code(results),
            "checks": [r.summary() for r in results],
        }
        (directory / "summary.json").write_text(
            json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    logger.info(f"Wrote {len(results)} reports to {directory}")
    return directory


async def run_scenario(
    scenario: Scenario,
    config: AppConfig,
    output_root: Optional[Path] = None,
    workers: Optional[int] = None,
) -> ScenarioOutcome:
    """Run every check of ``scenario`` and write its reports.

    Args:
        scenario: Parsed scenario.
        config: Application config passed to every check.
        output_root: Report root; resolved from the config when omitted.
        workers: Executor size. 1 runs checks on a single worker thread,
            None lets the process pool choose.
    """
    if output_root is None:
        output_root = config.output.get_output_dir_path()
    write_csv = (
        config.output.write_csv if scenario.write_csv is None else scenario.write_csv
    )
    logger.info(
        f"Running scenario '{scenario.name}' ({len(scenario.checks)} checks, "
        f"seed {scenario.seed})"
    )
    loop = asyncio.get_running_loop()
    with _executor(workers) as pool:
        futures = [
            loop.run_in_executor(pool, run_check, spec, index, scenario.seed, config)
            for index, spec in enumerate(scenario.checks)
        ]
        results = list(await asyncio.gather(*futures))

    directory = write_outputs(scenario, results, Path(output_root), write_csv)
    outcome = ScenarioOutcome(scenario=scenario.name, results=results, output_dir=directory)
    for failure in outcome.failures:
        logger.warning(f"Check '{failure.name}' ended with status {failure.status}")
    return outcome
