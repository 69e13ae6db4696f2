"""Configuration management for arrangement homology computations.

Values come from ``ARRH_*`` environment variables at import time and can be
overridden by the CLI through :func:`setup_environment`.

Requires Python 3.10+
"""

import logging
import os
from pathlib import Path
from typing import Any

from .constants import (
    DEFAULT_JOBS,
    DEFAULT_LOG_FORMAT,
    DEFAULT_LOG_LEVEL,
    DEFAULT_SEED,
    ENV_JOBS,
    ENV_LOG_FILE,
    ENV_LOG_LEVEL,
    ENV_PROGRESS,
    ENV_SEED,
    VALID_LOG_LEVELS,
)
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigurationError(
            "Environment value must be an integer", config_key=name, config_value=raw
        ) from e


class ArrangementConfig:
    """Seed, worker cap, progress bars and logging for arrangement computations."""

    def __init__(self):
        # Sampling and parallel scans
        self.seed = _env_int(ENV_SEED, DEFAULT_SEED)
        self.jobs = _env_int(ENV_JOBS, DEFAULT_JOBS)
        self.show_progress = os.getenv(ENV_PROGRESS, "1").strip() != "0"

        # Logging configuration
        self.log_level = os.getenv(ENV_LOG_LEVEL, DEFAULT_LOG_LEVEL).upper()
        self.log_file = os.getenv(ENV_LOG_FILE)
        self._file_handler: logging.FileHandler | None = None

        self._validate_config()

    def _validate_config(self) -> None:
        """Validate configuration values."""
        if self.jobs <= 0:
            raise ValueError(f"Job count must be positive, got {self.jobs}")

        if self.seed < 0:
            raise ValueError(f"Seed must be non-negative, got {self.seed}")

        if self.log_level not in VALID_LOG_LEVELS:
            raise ValueError(f"Invalid log level: {self.log_level}")

    def snapshot(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "jobs": self.jobs,
            "log_level": self.log_level,
            "log_file": self.log_file,
        }

    def restore(self, values: dict[str, Any]) -> None:
        for key, value in values.items():
            setattr(self, key, value)

    def setup_logging(self) -> None:
        """Apply the log level to the root logger and attach the log file once."""
        level = getattr(logging, self.log_level)
        root = logging.getLogger()
        logging.basicConfig(level=level, format=DEFAULT_LOG_FORMAT)
        # basicConfig is a no-op once handlers exist
        root.setLevel(level)

        if not self.log_file:
            return
        log_path = Path(self.log_file)
        if self._file_handler is not None:
            if Path(self._file_handler.baseFilename) == log_path.resolve():
                self._file_handler.setLevel(level)
                return
            root.removeHandler(self._file_handler)
            self._file_handler.close()

        log_path.parent.mkdir(parents=True, exist_ok=True)
        self._file_handler = logging.FileHandler(log_path)
        self._file_handler.setLevel(level)
        self._file_handler.setFormatter(logging.Formatter(DEFAULT_LOG_FORMAT))
        root.addHandler(self._file_handler)
        logger.info(f"Logging to file: {log_path}")

    def to_dict(self) -> dict[str, Any]:
        """Convert configuration to dictionary for display."""
        return {
            "Seed": self.seed,
            "Jobs": self.jobs,
            "Progress Bars": "on" if self.show_progress else "off",
            "Log Level": self.log_level,
            "Log File": self.log_file or "Console only",
        }

    def print_config(self) -> None:
        """Print current configuration."""
        print("\nCurrent Configuration:")
        print("-" * 40)
        for key, value in self.to_dict().items():
            print(f"  {key:<20}: {value}")
        print("-" * 40)


# Global configuration instance
config = ArrangementConfig()


def get_config() -> ArrangementConfig:
    return config


def setup_environment(
    log_level: str | None = None,
    log_file: str | None = None,
    seed: int | None = None,
    jobs: int | None = None,
    show_config: bool = False,
) -> None:
    """Apply CLI overrides on top of the environment and set up logging.

    Args:
        log_level: Optional log level override
        log_file: Optional log file path
        seed: Optional sampling seed override
        jobs: Optional worker cap override
        show_config: Print the resulting configuration table

    Raises:
        ValueError: An invalid override; the previous values are kept
    """
    previous = config.snapshot()
    overrides = {
        "log_level": log_level.upper() if log_level else None,
        "log_file": log_file or None,
        "seed": seed,
        "jobs": jobs,
    }
    config.restore({k: v for k, v in overrides.items() if v is not None})
    try:
        config._validate_config()
    except ValueError:
        config.restore(previous)
        raise

    config.setup_logging()
    logger.info(f"Environment ready: seed={config.seed}, jobs={config.jobs}")
    if show_config:
        config.print_config()


def get_seed() -> int:
    """Seed for random sampling and random test corpora."""
    return config.seed


def get_jobs() -> int:
    """Worker cap for parallel scans."""
    return config.jobs


def progress_enabled() -> bool:
    return config.show_progress
