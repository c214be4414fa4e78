import dataclasses
import json

import pytest

from submanifold_ot.cli.checks import CheckResult, check_seed, run_check
from submanifold_ot.cli.runner import (
    EXIT_FAILED,
    EXIT_OK,
    exit_code,
    run_scenario,
    write_outputs,
)
from submanifold_ot.cli.scenario import load_scenario, parse_scenario
from submanifold_ot.config import AppConfig


def _read_tree(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir()) if p.is_file()}


@pytest.mark.asyncio
async def test_run_scenario_single_worker(tmp_path, tiny_scenario_text):
    scenario = parse_scenario(tiny_scenario_text)
    outcome = await run_scenario(scenario, AppConfig(), tmp_path / "out", workers=1)

    assert [r.name for r in outcome.results] == ["disc", "alpha", "orthogonal"]
    assert [r.status for r in outcome.results] == ["ok", "ok", "ok"]
    assert outcome.exit_code == EXIT_OK
    assert outcome.output_dir == tmp_path / "out" / "tiny"

    files = _read_tree(outcome.output_dir)
    assert {"disc.json", "alpha.json", "orthogonal.json", "summary.json", "reports.csv"} <= set(files)
    summary = json.loads(files["summary.json"])
    assert summary["scenario"] == "tiny"
    assert summary["seed"] == 7
    assert summary["exit_code"] == 0
    assert [c["status"] for c in summary["checks"]] == ["ok", "ok", "ok"]
    report = json.loads(files["disc.json"])
    assert report["name"] == "weighted_isoperimetric"
    assert abs(report["relative_margin"]) < 1e-3


@pytest.mark.asyncio
async def test_runs_are_byte_identical(tmp_path, tiny_scenario_text):
    scenario = parse_scenario(tiny_scenario_text)
    first = await run_scenario(scenario, AppConfig(), tmp_path / "a", workers=1)
    second = await run_scenario(scenario, AppConfig(), tmp_path / "b", workers=1)
    assert _read_tree(first.output_dir) == _read_tree(second.output_dir)


@pytest.mark.slow
@pytest.mark.asyncio
async def test_process_pool_matches_single_worker(tmp_path, tiny_scenario_text):
    scenario = parse_scenario(tiny_scenario_text)
    single = await run_scenario(scenario, AppConfig(), tmp_path / "a", workers=1)
    pooled = await run_scenario(scenario, AppConfig(), tmp_path / "b", workers=2)
    assert _read_tree(single.output_dir) == _read_tree(pooled.output_dir)


@pytest.mark.asyncio
async def test_output_root_from_config(tmp_path, monkeypatch, tiny_scenario_text):
    monkeypatch.delenv("SUBMANIFOLD_OT_OUTPUT_DIR")
    config = AppConfig()
    config.output.output_dir = str(tmp_path / "configured")
    config.output.write_csv = False
    outcome = await run_scenario(parse_scenario(tiny_scenario_text), config, workers=1)
    assert outcome.output_dir == (tmp_path / "configured").resolve() / "tiny"
    assert not (outcome.output_dir / "reports.csv").exists()


def test_check_seed_is_stable():
    assert check_seed(7, 0) == check_seed(7, 0)
    assert check_seed(7, 0) != check_seed(7, 1)
    assert check_seed(7, 0) != check_seed(8, 0)


def test_failing_check_becomes_error_result():
    scenario = parse_scenario(
        json.dumps(
            {
                "version": 1,
                "name": "closed",
                "seed": 1,
                "checks": [
                    {
                        "kind": "weighted_isoperimetric",
                        "name": "sphere",
                        "surface": {"id": "sphere-cap", "params": {"theta_max": 3.141592653589793}, "resolution": 8},
                        "subspace": {"haar": {"seed": 1}},
                    }
                ],
            }
        )
    )
    result = run_check(scenario.checks[0], 0, scenario.seed, AppConfig())
    assert result.status == "error"
    assert result.payload["kind"] == "weighted_isoperimetric"
    assert "no boundary" in result.payload["error"]
    assert result.summary()["error"] == result.payload["error"]
    assert exit_code([result]) == EXIT_FAILED


def test_write_outputs_without_reports(tmp_path, tiny_scenario_text):
    scenario = parse_scenario(tiny_scenario_text)
    results = [CheckResult("alpha", "alpha_constant", "failed", {"passed": False})]
    directory = write_outputs(scenario, results, tmp_path, write_csv=True)
    assert not (directory / "reports.csv").exists()
    summary = json.loads((directory / "summary.json").read_text())
    assert summary["exit_code"] == EXIT_FAILED
    assert json.loads((directory / "alpha.json").read_text()) == {"passed": False}


@pytest.mark.slow
def test_equality_case_scenario():
    scenario = load_scenario("equality-case")
    result = run_check(scenario.checks[0], 0, scenario.seed, AppConfig())
    assert result.passed
    assert abs(result.report.relative_margin) < 1e-2


@pytest.mark.slow
def test_composed_transport_checks_pass():
    scenario = load_scenario("composed-transport")
    for index, spec in enumerate(scenario.checks):
        small = dataclasses.replace(spec, options={**spec.options, "instances": 5})
        result = run_check(small, index, scenario.seed, AppConfig())
        assert result.passed, result.payload
