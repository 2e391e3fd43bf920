"""
Configuration helper utilities for consistent config access across the system
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from jetlaw.core.config_provider import CentralConfigProvider, ConfigValidationError

logger = logging.getLogger(__name__)

ENV_PREFIX = "JETLAW_"

RANKING_STRATEGIES = ("grlex", "lex")


class EngineSettings(BaseModel):
    """Resolved engine knobs shared by every verdict-producing operation."""

    model_config = ConfigDict(frozen=True)

    seed: int = 0
    probes: int = Field(default=16, ge=1)
    tol: float = Field(default=1e-9, gt=0.0)
    max_order: int = Field(default=3, ge=1, le=4)
    ranking: str = "grlex"
    max_depth: int = Field(default=64, ge=1)
    jobs: int = 1

    @field_validator("ranking")
    @classmethod
    def _known_ranking(cls, value: str) -> str:
        if value not in RANKING_STRATEGIES:
            raise ValueError(f"ranking must be one of {RANKING_STRATEGIES}")
        return value


_ENV_KEYS = {
    "seed": "SEED",
    "probes": "PROBES",
    "tol": "TOL",
    "max_order": "MAX_ORDER",
    "ranking": "RANKING",
    "max_depth": "MAX_DEPTH",
    "jobs": "JOBS",
}


class ConfigHelpers:
    """Helper class for consistent configuration access patterns"""

    @staticmethod
    def default_config_files() -> List[str]:
        """
        Locate the default configuration files

        Returns:
            Paths of existing default YAML files (working-directory override first,
            then the packaged template)
        """
        candidates = [
            Path("jetlaw.yaml"),
            Path("config/jetlaw.yaml"),
            Path(__file__).resolve().parent.parent / "config" / "templates" / "jetlaw.yaml",
        ]
        for candidate in candidates:
            if candidate.exists():
                return [str(candidate)]
        return []

    @staticmethod
    def env_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
        """
        Collect JETLAW_* overrides from the environment

        Args:
            environ: Environment mapping (defaults to os.environ)

        Returns:
            Engine keys mapped to their raw string values
        """
        environ = os.environ if environ is None else environ
        overrides = {}
        for key, suffix in _ENV_KEYS.items():
            value = environ.get(ENV_PREFIX + suffix)
            if value not in (None, ""):
                overrides[key] = value
        return overrides

    @staticmethod
    def build_engine_settings(
        config_provider: Optional[CentralConfigProvider] = None,
        cli_overrides: Optional[Dict[str, Any]] = None,
        environ: Optional[Mapping[str, str]] = None,
    ) -> EngineSettings:
        """
        Resolve EngineSettings from defaults, YAML, environment and CLI flags

        Args:
            config_provider: Initialized provider, or None for defaults only
            cli_overrides: Explicit flag values; None entries are ignored
            environ: Environment mapping (defaults to os.environ)

        Returns:
            Frozen EngineSettings

        Raises:
            ConfigValidationError: If any layer supplies an invalid value
        """
        merged: Dict[str, Any] = {}
        if config_provider is not None:
            merged.update(config_provider.get_merged_section("engine"))
            merged.setdefault(
                "jobs", config_provider.get_merged_section("corpus").get("jobs", 1)
            )
        merged.update(ConfigHelpers.env_overrides(environ))
        merged.update({k: v for k, v in (cli_overrides or {}).items() if v is not None})

        unknown = sorted(set(merged) - set(EngineSettings.model_fields))
        if unknown:
            raise ConfigValidationError(f"Unknown engine settings: {unknown}")

        try:
            settings = EngineSettings(**merged)
        except ValidationError as e:
            raise ConfigValidationError(f"Invalid engine settings: {e}")

        logger.debug("Engine settings resolved: %s", settings.model_dump())
        return settings

    @staticmethod
    def get_logging_config(
        config_provider: Optional[CentralConfigProvider], verbose: bool
    ) -> Dict[str, Any]:
        """
        Get logging configuration for the CLI

        Args:
            config_provider: Initialized provider, or None
            verbose: Force DEBUG level

        Returns:
            Logging configuration dictionary for LoggingManager
        """
        logging_config: Dict[str, Any] = {"file_logging": False}
        if config_provider is not None:
            logging_config.update(config_provider.get_merged_section("logging"))
        if verbose:
            logging_config["level"] = "DEBUG"
        return logging_config
