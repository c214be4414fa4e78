import json

import pytest
from click.testing import CliRunner

from submanifold_ot.cli.app import main
from submanifold_ot.inequalities.euclidean import sobolev_constant_closed_form


@pytest.fixture
def invoke(tmp_path):
    runner = CliRunner(mix_stderr=False)
    log_file = tmp_path / "logs" / "cli.log"

    def _invoke(*args):
        return runner.invoke(
            main, ["--log-level", "ERROR", "--log-file", str(log_file), *args]
        )

    return _invoke


def test_catalog_json(invoke):
    result = invoke("catalog", "--json")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert set(data) == {"surfaces", "scenarios"}
    assert {s["name"] for s in data["surfaces"]} == {
        "flat-disc", "sphere-cap", "graph", "catenoid", "torus-patch"
    }
    assert "equality-case" in data["scenarios"]
    assert "theorem-2-2" in data["scenarios"]


def test_catalog_text(invoke):
    result = invoke("catalog")
    assert result.exit_code == 0
    assert "sphere-cap" in result.stdout
    assert "Bundled scenarios:" in result.stdout


def test_alpha_quadrature(invoke):
    result = invoke("alpha", "--n", "2", "--k", "1")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["value"] == pytest.approx(2 / 3, rel=1e-10)
    assert data["lower_bound"] <= data["value"]


def test_alpha_codimension_zero(invoke):
    data = json.loads(invoke("alpha", "--n", "3", "--k", "0").stdout)
    assert data["value"] == 1.0


def test_alpha_monte_carlo(invoke):
    result = invoke("alpha", "--n", "2", "--k", "2", "--mc", "2000", "--seed", "4")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["value"] == data["monte_carlo"]["value"]
    assert 0 < data["value"] <= 1


@pytest.mark.parametrize(
    "args",
    [
        ("--n", "2", "--k", "2"),
        ("--n", "2", "--k", "1", "--mc", "2000"),
        ("--n", "1", "--k", "1"),
        ("--n", "2", "--k", "1", "--mc", "10", "--seed", "1"),
    ],
)
def test_alpha_usage_errors(invoke, args):
    assert invoke("alpha", *args).exit_code == 2


def test_constant_rejects_exponent(invoke):
    result = invoke("constant", "--n", "3", "--p", "3.5")
    assert result.exit_code == 2
    assert "p must lie in" in result.stderr


@pytest.mark.slow
def test_constant_search(invoke):
    result = invoke("constant", "--n", "3", "--p", "2", "--grid", "3")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["closed_form"] == pytest.approx(sobolev_constant_closed_form(3, 2.0))
    assert data["relative_error"] < 1e-6
    assert data["evaluations"] > 0


def test_run_scenario_file(invoke, tmp_path, tiny_scenario_file):
    result = invoke("run", str(tiny_scenario_file), "--workers", "1")
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0].split() == ["ok", "weighted_isoperimetric", "disc"]
    assert lines[-1].startswith("Reports written to")
    assert (tmp_path / "reports" / "tiny" / "summary.json").is_file()
    assert (tmp_path / "logs" / "cli.log").is_file()


def test_run_output_dir_option(invoke, tmp_path, monkeypatch, tiny_scenario_file):
    monkeypatch.delenv("SUBMANIFOLD_OT_OUTPUT_DIR")
    target = tmp_path / "chosen"
    result = invoke("run", str(tiny_scenario_file), "--workers", "1", "--output-dir", str(target))
    assert result.exit_code == 0, result.stderr
    assert (target / "tiny" / "disc.json").is_file()


def test_run_failing_scenario(invoke, tmp_path):
    path = tmp_path / "closed.json"
    path.write_text(
        json.dumps(
            {
                "version": 1,
                "name": "closed",
                "seed": 3,
                "checks": [
                    {
                        "kind": "classical_isoperimetric",
                        "name": "sphere",
                        "surface": {"id": "sphere-cap", "params": {"theta_max": 3.141592653589793}, "resolution": 8},
                    }
                ],
            }
        )
    )
    result = invoke("run", str(path), "--workers", "1")
    assert result.exit_code == 1
    assert result.stdout.startswith("error")
    assert "Failed checks: sphere" in result.stderr


@pytest.mark.slow
def test_run_bundled_theorem_2_2(invoke, tmp_path):
    result = invoke("run", "theorem-2-2", "--workers", "1")
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert [line.split() for line in lines[:-1]] == [
        ["ok", "composed_optimality", "projection-then-inner-transport"],
        ["ok", "projection_optimality", "projection-plans"],
        ["ok", "orthogonal_equal_cost", "orthogonal-discs"],
    ]
    directory = tmp_path / "reports" / "composed-transport"
    summary = json.loads((directory / "summary.json").read_text())
    assert summary["scenario"] == "composed-transport"
    composed = json.loads((directory / "projection-then-inner-transport.json").read_text())
    assert composed["instances"] == 100
    assert composed["passed"] is True


def test_run_unknown_scenario(invoke):
    result = invoke("run", "no-such-scenario")
    assert result.exit_code == 2
    assert "no bundled scenario" in result.stderr


def test_run_invalid_scenario(invoke, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"version": 1,\n "name": }')
    result = invoke("run", str(path))
    assert result.exit_code == 2
    assert "line 2" in result.stderr
