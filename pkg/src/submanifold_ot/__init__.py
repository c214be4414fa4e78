"""
submanifold-ot - optimal transport on sampled immersed submanifolds and the
weighted isoperimetric and Sobolev inequalities it yields.
"""

from .config import AppConfig, load_config
from .logging_config import logger, setup_logging

__version__ = "0.1.0"

__all__ = ["AppConfig", "__version__", "load_config", "logger", "setup_logging"]
