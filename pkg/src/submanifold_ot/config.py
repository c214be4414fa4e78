"""
Configuration management for submanifold-ot.
"""

import importlib.resources
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from platformdirs import user_config_dir, user_data_dir

APP_NAME = "submanifold-ot"
OUTPUT_DIR_ENV = "SUBMANIFOLD_OT_OUTPUT_DIR"
LOG_LEVEL_ENV = "SUBMANIFOLD_OT_LOG_LEVEL"

# Global storage for active configuration overrides
_active_config_overrides: Optional[Dict] = None


@dataclass
class GeometryConfig:
    # Finite-difference step as a fraction of the cell width; at most 0.25 so
    # that the widest stencil stays inside the owning cell.
    fd_fraction: float = 0.25
    critical_eps: float = 1e-8
    frame_tol: float = 1e-10
    normal_tol: float = 1e-8
    min_gram_det: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.fd_fraction <= 0.25:
            raise ValueError(
                f"fd_fraction must lie in (0, 0.25], got {self.fd_fraction}"
            )


@dataclass
class TransportConfig:
    merge_tol: float = 1e-12
    max_atoms: int = 5000
    dense_limit: int = 1000
    max_cycle_len: int = 6
    random_cycles: int = 10_000
    exhaustive_limit: int = 1_000_000
    marginal_tol: float = 1e-10
    slack_tol: float = 1e-9
    num_itermax: int = 1_000_000


@dataclass
class InequalityConfig:
    jacobian_floor: float = 1e-6
    margin_tol: float = 1e-6
    alpha_quadrature_order: int = 256
    sobolev_profile_grid: int = 7
    sobolev_stationarity_tol: float = 1e-6


@dataclass
class OutputConfig:
    output_dir: Optional[str] = None  # None selects the platform data dir
    write_csv: bool = True

    def get_output_dir_path(self) -> Path:
        env_dir = os.getenv(OUTPUT_DIR_ENV)
        if env_dir:
            p = Path(env_dir).expanduser().resolve()
        elif self.output_dir:
            p = Path(self.output_dir).expanduser().resolve()
        else:
            p = Path(user_data_dir(APP_NAME)) / "reports"
        p.mkdir(parents=True, exist_ok=True)
        return p


@dataclass
class AppConfig:
    name: str = "submanifold-ot"
    log_level: Optional[str] = None
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    transport: TransportConfig = field(default_factory=TransportConfig)
    inequality: InequalityConfig = field(default_factory=InequalityConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        # Handle initialization from YAML
        if isinstance(self.geometry, dict):
            self.geometry = GeometryConfig(**self.geometry)
        if isinstance(self.transport, dict):
            self.transport = TransportConfig(**self.transport)
        if isinstance(self.inequality, dict):
            self.inequality = InequalityConfig(**self.inequality)
        if isinstance(self.output, dict):
            self.output = OutputConfig(**self.output)

    def effective_log_level(self) -> str:
        """Config value first, then SUBMANIFOLD_OT_LOG_LEVEL, LOG_LEVEL, INFO."""
        level = (
            self.log_level
            or os.getenv(LOG_LEVEL_ENV)
            or os.getenv("LOG_LEVEL")
            or "INFO"
        )
        return level.upper()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _packaged_default_text() -> Optional[str]:
    package_name = __name__.split(".")[0]  # 'submanifold_ot'
    resource = importlib.resources.files(package_name).joinpath("config/config.yaml")
    if resource.is_file():
        return resource.read_text(encoding="utf-8")
    fallback = Path(__file__).resolve().parent / "config" / "config.yaml"
    if fallback.exists():
        return fallback.read_text(encoding="utf-8")
    return None


def ensure_default_config() -> Optional[Path]:
    """Copy the packaged default config into the platform config dir if missing.

    Returns:
        Path of the platform config file, or None when it could not be created.
    """
    logger = logging.getLogger(__name__)
    config_dir = Path(user_config_dir(APP_NAME))
    config_path = config_dir / "config.yaml"
    if config_path.exists():
        return config_path

    text = _packaged_default_text()
    if text is None:
        logger.error("Packaged default configuration not found")
        return None
    try:
        config_dir.mkdir(parents=True, exist_ok=True)
        config_path.write_text(text, encoding="utf-8")
        logger.info(f"Created default configuration at {config_path}")
        return config_path
    except OSError as e:
        logger.warning(f"Could not create default config at {config_path}: {e}")
        return None


def get_config_search_paths() -> List[Path]:
    """Get list of paths to search for config file, prioritizing platform-specific."""
    return [
        Path(user_config_dir(APP_NAME)) / "config.yaml",
        Path("./config.yaml").resolve(),
    ]


def _config_from_data(config_data: Dict[str, Any]) -> AppConfig:
    known = {"name", "log_level", "geometry", "transport", "inequality", "output"}
    unknown = set(config_data) - known
    if unknown:
        raise ValueError(f"Unknown configuration sections: {sorted(unknown)}")
    return AppConfig(**config_data)


def _load_base_config(config_path_override: Optional[str] = None) -> AppConfig:
    """Internal function to load the base configuration from YAML file."""
    logger = logging.getLogger(__name__)

    if config_path_override:
        search_paths = [Path(config_path_override).resolve()]
    else:
        ensure_default_config()
        search_paths = get_config_search_paths()

    for path_obj in search_paths:
        if path_obj.exists() and path_obj.is_file():
            logger.info(f"Loading configuration from {path_obj}")
            try:
                with open(path_obj, "r", encoding="utf-8") as f:
                    config_data = yaml.safe_load(f)

                if not config_data:  # Handles empty YAML
                    logger.warning(
                        f"Config file {path_obj} is empty, trying next location."
                    )
                    continue

                logger.debug(f"Loaded configuration data: {config_data}")
                return _config_from_data(config_data)
            except (yaml.YAMLError, TypeError, ValueError) as e:
                logger.error(f"Error loading configuration from {path_obj}: {e}")
                continue

    if not config_path_override:
        text = _packaged_default_text()
        if text:
            logger.info("Using packaged default configuration")
            return _config_from_data(yaml.safe_load(text) or {})

    logger.info("Returning default AppConfig as fallback.")
    return AppConfig()


def _apply_overrides(config: AppConfig, overrides: Dict[str, Any]) -> None:
    logger = logging.getLogger(__name__)
    for key, value in overrides.items():
        if value is None:
            continue
        section = getattr(config, key, None)
        if isinstance(value, dict) and section is not None and not isinstance(
            section, (str, int, float)
        ):
            for sub_key, sub_value in value.items():
                if sub_value is None:
                    continue
                if not hasattr(section, sub_key):
                    raise ValueError(f"Unknown configuration key {key}.{sub_key}")
                setattr(section, sub_key, sub_value)
                logger.debug(f"  {key}.{sub_key} override set to: {sub_value}")
        elif hasattr(config, key):
            setattr(config, key, value)
            logger.debug(f"  {key} override set to: {value}")
        else:
            raise ValueError(f"Unknown configuration key {key}")


def load_config(
    config_path: Optional[str] = None, overrides: Optional[Dict] = None
) -> AppConfig:
    """Load configuration from YAML file with optional overrides.

    Overrides are nested dicts mirroring the YAML layout and are remembered
    for subsequent calls in the same process.
    """
    logger = logging.getLogger(__name__)

    global _active_config_overrides

    # If no new overrides provided, use stored overrides
    if overrides is None and _active_config_overrides is not None:
        overrides = _active_config_overrides
    # If new overrides provided, store them
    elif overrides is not None:
        _active_config_overrides = overrides

    config = _load_base_config(config_path)

    if overrides:
        logger.debug("Applying configuration overrides:")
        _apply_overrides(config, overrides)

    logger.info("Final configuration values:")
    logger.info(f"  Name: {config.name}")
    logger.info(f"  Log Level: {config.effective_log_level()}")
    logger.debug(f"  Geometry: {config.geometry}")
    logger.debug(f"  Transport: {config.transport}")
    logger.debug(f"  Inequality: {config.inequality}")
    logger.debug(f"  Output: {config.output}")
    return config


def reset_config_overrides() -> None:
    """Forget overrides remembered by previous load_config calls."""
    global _active_config_overrides
    _active_config_overrides = None
