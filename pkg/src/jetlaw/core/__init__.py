"""Core utilities"""
from jetlaw.core.config_helpers import ConfigHelpers, EngineSettings
from jetlaw.core.config_provider import CentralConfigProvider as ConfigProvider
from jetlaw.core.config_provider import ConfigValidationError
from jetlaw.core.logging_manager import LoggingManager, log_event

__all__ = [
    "ConfigProvider",
    "ConfigHelpers",
    "EngineSettings",
    "LoggingManager",
    "ConfigValidationError",
    "log_event",
]
