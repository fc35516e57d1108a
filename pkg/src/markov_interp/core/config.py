import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from ..paths import get_default_config, get_default_config_path

LOGGER_NAME = "markov_interp"

#: Environment variable overriding the log level: ``off``, ``info`` or ``debug``.
LOG_ENV_VAR = "GSI_LOG"

_ENV_LEVELS = {
    "off": logging.CRITICAL + 10,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class ConfigMixin:
    config_path: Optional[str] = None
    config: Dict[str, Any]

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file, falling back to defaults."""
        if not self.config_path:
            self.config_path = str(get_default_config_path())

        config_path = Path(self.config_path)
        default_config = get_default_config()

        if not config_path.exists():
            logging.getLogger(LOGGER_NAME).debug(
                f"No config at {config_path}, using defaults"
            )
            return default_config

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                loaded_config = yaml.safe_load(f) or {}
            if not isinstance(loaded_config, dict):
                raise yaml.YAMLError("top level must be a mapping")
            return self._merge_configs(default_config, loaded_config)

        except yaml.YAMLError as e:
            logging.getLogger(LOGGER_NAME).error(
                f"Error loading config from {config_path}: {e}"
            )
            return default_config

    def _merge_configs(
        self, default: Dict[str, Any], custom: Dict[str, Any]
    ) -> Dict[str, Any]:
        """Recursively merge two configuration dictionaries."""
        result = default.copy()
        for key, value in custom.items():
            if (
                key in result
                and isinstance(result[key], dict)
                and isinstance(value, dict)
            ):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value
        return result

    def setting(self, key: str, default: Any = None) -> Any:
        return self.config.get("settings", {}).get(key, default)

    def _log_level(self, debug: bool = False) -> int:
        env = os.environ.get(LOG_ENV_VAR, "").strip().lower()
        if env in _ENV_LEVELS:
            return _ENV_LEVELS[env]
        if debug:
            return logging.DEBUG
        level = str(self.setting("log_level", "INFO")).upper()
        return getattr(logging, level, logging.INFO)

    def _setup_logging(self, debug: bool = False) -> None:
        """Configure logging based on config, ``--debug`` and ``GSI_LOG``."""
        log_file = self.setting("log_file", "")

        if log_file:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)

        root_logger = logging.getLogger()
        root_logger.setLevel(logging.WARNING)

        self.logger = logging.getLogger(LOGGER_NAME)
        self.logger.setLevel(self._log_level(debug))

        formatter = logging.Formatter(
            "%(asctime)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
        )

        # Remove existing handlers to avoid duplicate output
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)
            handler.close()

        if log_file:
            file_handler = logging.FileHandler(log_file, encoding="utf-8")
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)
        self.logger.propagate = False
