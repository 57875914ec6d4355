"""Config-driven experiments, the acceptance battery and the ``maskfree`` command."""
from ..freelimits import parse_word
from .config import ConfigError, ExperimentConfig, MaskSpec, load_config, parse_config
from .runner import RunReport, run

__all__ = ["ConfigError", "ExperimentConfig", "MaskSpec", "RunReport", "load_config", "parse_config",
           "parse_word", "run"]
