import json

import pytest

TINY_SCENARIO = {
    "version": 1,
    "name": "tiny",
    "seed": 7,
    "checks": [
        {
            "kind": "weighted_isoperimetric",
            "name": "disc",
            "tolerance": 1e-3,
            "surface": {"id": "flat-disc", "resolution": 24},
            "subspace": {"basis": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]},
        },
        {
            "kind": "alpha_constant",
            "name": "alpha",
            "tolerance": 5.0,
            "options": {"n": 2, "k": 1, "samples": 20000},
        },
        {
            "kind": "orthogonal_equal_cost",
            "name": "orthogonal",
            "options": {"instances": 5, "atoms": 40},
        },
    ],
}


@pytest.fixture
def tiny_scenario_text():
    return json.dumps(TINY_SCENARIO, indent=2)


@pytest.fixture
def tiny_scenario_file(tmp_path, tiny_scenario_text):
    path = tmp_path / "tiny.json"
    path.write_text(tiny_scenario_text)
    return path
