"""Numerics configuration.

- Defaults come from the module constants that own them, merged recursively into a loaded
  JSON file without overwriting existing keys.
- A corrupted file falls back to the defaults with a warning.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any

from utils.error_handler import ConfigurationError
from utils.logging_setup import get_logger

from . import normest, oscint, schrod, trigsum

logger = get_logger('config')


def default_settings() -> dict[str, Any]:
    return {
        'seed': 0,
        'workers': 1,
        'format': 'csv',
        'log_level': 'WARNING',
        'trigsum': {
            'gamma_tol': trigsum.DEFAULT_GAMMA_TOL,
        },
        'normest': {
            'tol': normest.DEFAULT_TOL,
            'max_iter': normest.DEFAULT_MAX_ITER,
            'restarts': normest.DEFAULT_RESTARTS,
        },
        'oscint': {
            'tol': oscint.DEFAULT_TOL,
            'max_panels': oscint.MAX_PANELS,
        },
        'schrod': {
            'gamma': schrod.DEFAULT_GAMMA,
            'eta': schrod.DEFAULT_ETA,
            'base_nodes': schrod.SCAN_BASE_NODES,
            'max_validation_nodes': schrod.MAX_VALIDATION_NODES,
        },
    }


class NumericsConfig:
    """Nested numerics settings with dotted-key access."""

    def __init__(self, config_file: str | Path | None = None):
        self.config_file = Path(config_file) if config_file else None
        self.config: dict[str, Any] = {}
        self.load_config()

    def load_config(self) -> None:
        if self.config_file is not None:
            if not self.config_file.exists():
                raise ConfigurationError(
                    f"config file not found: {self.config_file}", error_code='CONFIG_MISSING'
                )
            try:
                with open(self.config_file, encoding='utf-8') as f:
                    loaded = json.load(f)
                if not isinstance(loaded, dict):
                    raise ValueError("top level must be an object")
                self.config = loaded
            except (OSError, ValueError) as e:
                logger.warning(f"Ignoring unreadable config {self.config_file}: {e}")
                self.config = {}

        self._merge_defaults(self.config, default_settings())

    def _merge_defaults(self, cfg: dict[str, Any], defaults: dict[str, Any]) -> None:
        """Add missing keys from defaults, recursing into nested sections."""
        for key, def_val in defaults.items():
            if key not in cfg:
                cfg[key] = copy.deepcopy(def_val)
            elif isinstance(def_val, dict) and isinstance(cfg.get(key), dict):
                self._merge_defaults(cfg[key], def_val)

    def save_config(self, path: str | Path | None = None) -> None:
        target = Path(path) if path else self.config_file
        if target is None:
            raise ConfigurationError("no config file to save to")
        try:
            with open(target, 'w', encoding='utf-8') as f:
                json.dump(self.config, f, indent=2, ensure_ascii=False)
        except OSError as e:
            raise ConfigurationError(f"could not save config to {target}: {e}") from e

    def get(self, key: str, default: Any = None) -> Any:
        value = self.config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def set(self, key: str, value: Any) -> None:
        """Set a dotted key in memory; call save_config() to persist."""
        keys = key.split('.')
        config = self.config
        for k in keys[:-1]:
            if not isinstance(config.get(k), dict):
                config[k] = {}
            config = config[k]
        config[keys[-1]] = value

    def require_number(self, key: str, minimum: float | None = None) -> float:
        value = self.get(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"config value {key} must be a number, got {value!r}")
        if minimum is not None and value < minimum:
            raise ConfigurationError(f"config value {key} must be >= {minimum}, got {value}")
        return value
