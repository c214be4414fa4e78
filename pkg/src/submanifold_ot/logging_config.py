"""Logging configuration for submanifold-ot"""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Optional

from platformdirs import user_log_dir

from .config import APP_NAME, AppConfig

_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def get_default_log_dir() -> Path:
    """Get the default log directory based on OS standards"""
    return Path(user_log_dir(APP_NAME))


def setup_logging(
    config: Optional[AppConfig] = None, log_file: Optional[Path] = None
) -> Path:
    """Configure logging for the CLI.

    Args:
        config: Application config; its effective log level is used.
        log_file: Explicit log file, otherwise one inside the platform log dir.

    Returns:
        Path of the log file receiving records.
    """
    log_level = config.effective_log_level() if config else "INFO"

    valid_levels = {
        "DEBUG": logging.DEBUG,
        "INFO": logging.INFO,
        "WARNING": logging.WARNING,
        "ERROR": logging.ERROR,
        "CRITICAL": logging.CRITICAL,
    }
    effective_level = valid_levels.get(log_level, logging.INFO)

    package_logger = logging.getLogger("submanifold_ot")
    root_logger = logging.getLogger()

    # Remove any existing handlers to avoid duplicates
    for lg in (package_logger, root_logger):
        for handler in lg.handlers[:]:
            lg.removeHandler(handler)

    formatter = logging.Formatter(_FORMAT)

    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setLevel(effective_level)
    stderr_handler.setFormatter(formatter)
    root_logger.addHandler(stderr_handler)

    if log_file is None:
        log_path = get_default_log_dir()
        log_path.mkdir(parents=True, exist_ok=True)
        log_file = log_path / "submanifold-ot.log"
    else:
        log_file.parent.mkdir(parents=True, exist_ok=True)

    # Add rotating file handler (10MB files, keep 5 backups)
    file_handler = logging.handlers.RotatingFileHandler(
        log_file, maxBytes=10_000_000, backupCount=5, encoding="utf-8"
    )
    file_handler.setLevel(effective_level)
    file_handler.setFormatter(formatter)
    root_logger.addHandler(file_handler)

    root_logger.setLevel(effective_level)
    package_logger.setLevel(effective_level)
    package_logger.propagate = True

    package_logger.debug(f"Log File: {log_file}")
    package_logger.debug(f"Log Level: {log_level}")
    return log_file


# Export the logger for use in other modules
logger = logging.getLogger("submanifold_ot")
