"""
Configuration loading: YAML file, then environment overrides.

Example config.yaml:

    tolerances:
      rank_rel: 1.0e-10
      psd_rel: 1.0e-9
    analysis:
      effort: 64
      seed: 0
"""

import logging
import os
from pathlib import Path
from typing import Dict, Mapping, Optional

import yaml

from qprim.errors import ConfigurationError, InvalidInput
from qprim.numerics import DEFAULT_POLICY, TolerancePolicy

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = 'config.yaml'
RANK_ENV_VAR = 'QPRIM_TOL_RANK'

ANALYSIS_DEFAULTS = {
    'effort': 64,
    'seed': 0,
    'samples': 256,
    'exact': False,
}


def load_config(path: Optional[str] = None) -> Dict:
    """Load and validate configuration file"""
    explicit = path is not None
    path = path or DEFAULT_CONFIG_PATH
    config = {}
    if Path(path).exists():
        try:
            with open(path) as f:
                config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            logger.error(f"Config loading failed: {str(e)}")
            raise ConfigurationError(f"Invalid configuration file {path}") from e
        if not isinstance(config, dict):
            raise ConfigurationError(f"Configuration file {path} must hold a mapping")
        logger.info(f"Loaded configuration from {path}")
    elif explicit:
        raise ConfigurationError(f"Configuration file {path} not found")

    config.setdefault('tolerances', {})
    analysis = config.setdefault('analysis', {})
    for key, value in ANALYSIS_DEFAULTS.items():
        analysis.setdefault(key, value)
    return config


def policy_from_config(config: Mapping, environ: Mapping[str, str] = os.environ) -> TolerancePolicy:
    values = DEFAULT_POLICY.to_dict()
    for key, raw in (config.get('tolerances') or {}).items():
        if key not in values:
            raise ConfigurationError(f"Unknown tolerance key: {key}")
        try:
            values[key] = float(raw)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Tolerance {key} is not a number: {raw!r}") from e

    if environ.get(RANK_ENV_VAR):
        raw = environ[RANK_ENV_VAR]
        try:
            values['rank_rel'] = float(raw)
        except ValueError as e:
            raise ConfigurationError(f"{RANK_ENV_VAR} is not a number: {raw!r}") from e
        logger.info(f"rank_rel overridden from {RANK_ENV_VAR}: {values['rank_rel']}")

    try:
        return TolerancePolicy(**values)
    except InvalidInput as e:
        raise ConfigurationError(str(e)) from e


def load_policy(config_path: Optional[str] = None,
                environ: Mapping[str, str] = os.environ) -> TolerancePolicy:
    return policy_from_config(load_config(config_path), environ)
