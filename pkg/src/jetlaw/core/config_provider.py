"""
YAML configuration files for jetlaw.

Each file is a mapping of top-level blocks (``engine``, ``corpus``, ``logging``).
Several files may be given; ``get_merged_section`` overlays a block across them in
order, so a project file placed after the packaged template overrides it key by key.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List

import yaml

logger = logging.getLogger(__name__)


class ConfigValidationError(Exception):
    """Raised when a configuration file or value is unusable"""

    pass


def _read_mapping(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ConfigValidationError(f"Configuration file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigValidationError(f"Invalid YAML in {path}: {e}")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigValidationError(f"Cannot read {path}: {e}")
    if data is None:
        raise ConfigValidationError(f"Configuration file is empty: {path}")
    if not isinstance(data, dict):
        raise ConfigValidationError(f"Configuration file must contain a mapping: {path}")
    return data


class CentralConfigProvider:
    """Ordered set of loaded YAML files, keyed by file stem."""

    def __init__(self, config_files: List[str]):
        self.config_files = [str(f) for f in config_files]
        self.config_data: Dict[str, Dict[str, Any]] = {}

    def initialize(self) -> None:
        """Read every file; raises ConfigValidationError on the first bad one."""
        for config_file in self.config_files:
            path = Path(config_file)
            self.config_data[path.stem] = _read_mapping(path)
            logger.debug("loaded configuration %s", path)

    def get_merged_section(self, name: str) -> Dict[str, Any]:
        """Overlay block ``name`` across the files; later files win."""
        merged: Dict[str, Any] = {}
        for config_file in self.config_files:
            block = self.config_data.get(Path(config_file).stem, {}).get(name)
            if block is None:
                continue
            if not isinstance(block, dict):
                raise ConfigValidationError(
                    f"Section '{name}' in {config_file} must be a mapping"
                )
            merged.update(block)
        return merged
