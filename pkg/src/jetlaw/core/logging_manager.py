"""
Logging setup for the jetlaw CLI and corpus runs.

Records go to stderr (stdout is reserved for verdict reports) and optionally to a
rotating ``jetlaw.log``. Engine modules log through ``logging.getLogger(__name__)``
and use ``log_event`` for one-line JSON events that can be grepped out of a run.
"""

import json
import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

LOG_FORMAT = "%(asctime)s,%(msecs)03d - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LOG_FILE_NAME = "jetlaw.log"

COMPONENTS: List[str] = [
    "jetlaw.cli",
    "jetlaw.commands",
    "jetlaw.expr",
    "jetlaw.jet",
    "jetlaw.variational",
    "jetlaw.claws",
    "jetlaw.symmetry",
    "jetlaw.hodograph",
    "jetlaw.problem",
    "jetlaw.corpus",
]

DEFAULTS: Dict[str, Any] = {
    "level": "INFO",
    "format": LOG_FORMAT,
    "datefmt": DATE_FORMAT,
    "file_logging": False,
    "log_dir": "logs",
    "max_log_size_mb": 20,
    "backup_count": 3,
    "force_flush": True,
}


class _FlushOnEmit:
    """Mixin: flush after each record so corpus progress shows up while a file runs."""

    def emit(self, record: logging.LogRecord) -> None:
        super().emit(record)  # type: ignore[misc]
        self.flush()  # type: ignore[attr-defined]


class _StderrHandler(_FlushOnEmit, logging.StreamHandler):
    pass


class _RotatingLogFile(_FlushOnEmit, logging.handlers.RotatingFileHandler):
    pass


def log_event(logger: logging.Logger, event: str, **payload: Any) -> None:
    """Emit a one-line structured JSON event at INFO level."""
    logger.info(json.dumps({"event": event, **payload}, sort_keys=True, default=str))


class LoggingManager:
    """Configures the root logger once, before any engine work."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config: Dict[str, Any] = {**DEFAULTS, **(config or {})}
        self.loggers: Dict[str, logging.Logger] = {}
        self.initialized = False

    @property
    def level(self) -> int:
        return getattr(logging, str(self.config["level"]).upper())

    def _formatter(self) -> logging.Formatter:
        return logging.Formatter(fmt=self.config["format"], datefmt=self.config["datefmt"])

    def _console_handler(self) -> logging.Handler:
        cls = _StderrHandler if self.config["force_flush"] else logging.StreamHandler
        return cls(sys.stderr)

    def _file_handler(self) -> logging.Handler:
        log_dir = Path(self.config["log_dir"])
        log_dir.mkdir(parents=True, exist_ok=True)
        cls = (
            _RotatingLogFile
            if self.config["force_flush"]
            else logging.handlers.RotatingFileHandler
        )
        return cls(
            log_dir / LOG_FILE_NAME,
            maxBytes=int(self.config["max_log_size_mb"]) * 1024 * 1024,
            backupCount=int(self.config["backup_count"]),
            encoding="utf-8",
        )

    def initialize_logging(self) -> None:
        """Install the stderr handler (and the log file when enabled) on the root logger."""
        if self.initialized:
            return

        handlers = [self._console_handler()]
        if self.config["file_logging"]:
            handlers.append(self._file_handler())

        root = logging.getLogger()
        root.setLevel(self.level)
        root.handlers.clear()
        formatter = self._formatter()
        for handler in handlers:
            handler.setLevel(self.level)
            handler.setFormatter(formatter)
            root.addHandler(handler)

        self.loggers = {name: logging.getLogger(name) for name in COMPONENTS}
        self.initialized = True
        logging.getLogger(__name__).debug(
            "logging ready: level=%s file_logging=%s",
            logging.getLevelName(self.level),
            self.config["file_logging"],
        )

    def get_logger(self, name: str) -> logging.Logger:
        """Logger for a component; only valid after ``initialize_logging``."""
        if not self.initialized:
            raise RuntimeError(
                "Logging not initialized. Call initialize_logging() first."
            )
        return self.loggers.get(name, logging.getLogger(name))
