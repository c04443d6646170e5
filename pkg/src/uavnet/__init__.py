"""Coverage analysis of 3D two-hop cellular networks with wirelessly
backhauled aerial relays: analytical machinery plus an independent
Monte Carlo network simulator used as its validation oracle."""

__version__ = "0.1.0"

from .config import (AntennaModel, Environment, NetworkConfig, ConfigError,
                     db_to_linear, linear_to_db, environment_presets,
                     load_config, validate)
from .geometry import Cond, ServingGeometry
from .coverage import CoverageRequest, CoverageResult, coverage, \
    coverage_interference_limited
from .simulate import estimate_coverage, default_window_radius

__all__ = [
    "AntennaModel", "Environment", "NetworkConfig", "ConfigError",
    "db_to_linear", "linear_to_db", "environment_presets", "load_config",
    "validate", "Cond", "ServingGeometry", "CoverageRequest", "CoverageResult",
    "coverage", "coverage_interference_limited", "estimate_coverage",
    "default_window_radius", "__version__",
]
