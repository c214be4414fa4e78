import logging
import math

import numpy as np
import pytest

from submanifold_ot.config import reset_config_overrides
from submanifold_ot.geometry import catalog, sample_immersion


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path, monkeypatch):
    """Keep config, logs and reports of every test inside tmp_path."""
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "xdg-config"))
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path / "xdg-data"))
    monkeypatch.setenv("XDG_STATE_HOME", str(tmp_path / "xdg-state"))
    monkeypatch.setenv("SUBMANIFOLD_OT_OUTPUT_DIR", str(tmp_path / "reports"))
    monkeypatch.delenv("SUBMANIFOLD_OT_LOG_LEVEL", raising=False)
    monkeypatch.delenv("LOG_LEVEL", raising=False)
    monkeypatch.chdir(tmp_path)
    reset_config_overrides()

    root = logging.getLogger()
    package = logging.getLogger("submanifold_ot")
    saved = (root.handlers[:], root.level, package.handlers[:], package.level)
    yield
    for lg, handlers, level in ((root, saved[0], saved[1]), (package, saved[2], saved[3])):
        for handler in lg.handlers[:]:
            if handler not in handlers:
                lg.removeHandler(handler)
                handler.close()
        for handler in handlers:
            if handler not in lg.handlers:
                lg.addHandler(handler)
        lg.setLevel(level)
    reset_config_overrides()


@pytest.fixture(scope="session")
def flat_square():
    """[-1, 1]^2 in R^3 as a graph of amplitude zero."""
    return sample_immersion(catalog("graph", amplitude=0.0, resolution=16))


@pytest.fixture(scope="session")
def unit_sphere():
    return sample_immersion(catalog("sphere-cap", theta_max=math.pi, resolution=64))


@pytest.fixture(scope="session")
def catenoid_surface():
    return sample_immersion(catalog("catenoid", resolution=48))


@pytest.fixture(scope="session")
def flat_disc():
    return sample_immersion(catalog("flat-disc", resolution=64))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
