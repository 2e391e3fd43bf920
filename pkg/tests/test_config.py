"""
Tests for configuration layering and logging setup
"""

import json
import logging

import pytest
import yaml

from jetlaw.core import (
    ConfigHelpers,
    ConfigProvider,
    ConfigValidationError,
    EngineSettings,
    LoggingManager,
    log_event,
)


@pytest.fixture
def write_yaml(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data) if not isinstance(data, str) else data)
        return str(path)

    return _write


class TestConfigProvider:
    """YAML loading and section merging"""

    def test_later_files_win(self, write_yaml):
        base = write_yaml("base.yaml", {"engine": {"seed": 1, "probes": 8}})
        local = write_yaml("local.yaml", {"engine": {"seed": 7}})
        provider = ConfigProvider([base, local])
        provider.initialize()
        assert provider.get_merged_section("engine") == {"seed": 7, "probes": 8}
        assert provider.get_merged_section("corpus") == {}

    def test_missing_file(self, tmp_path):
        provider = ConfigProvider([str(tmp_path / "absent.yaml")])
        with pytest.raises(ConfigValidationError, match="not found"):
            provider.initialize()

    def test_empty_file(self, write_yaml):
        provider = ConfigProvider([write_yaml("empty.yaml", "")])
        with pytest.raises(ConfigValidationError, match="empty"):
            provider.initialize()

    def test_invalid_yaml(self, write_yaml):
        provider = ConfigProvider([write_yaml("broken.yaml", "engine: [seed: 1\n")])
        with pytest.raises(ConfigValidationError, match="Invalid YAML"):
            provider.initialize()

    def test_non_mapping_section(self, write_yaml):
        provider = ConfigProvider([write_yaml("odd.yaml", {"engine": [1, 2]})])
        provider.initialize()
        with pytest.raises(ConfigValidationError):
            provider.get_merged_section("engine")


class TestEngineSettings:
    """Precedence: defaults < YAML < JETLAW_* < CLI flags"""

    def test_defaults(self):
        settings = ConfigHelpers.build_engine_settings(environ={})
        assert settings == EngineSettings()
        assert settings.probes == 16
        assert settings.ranking == "grlex"

    def test_packaged_template_matches_defaults(self):
        files = ConfigHelpers.default_config_files()
        assert files
        provider = ConfigProvider(files)
        provider.initialize()
        settings = ConfigHelpers.build_engine_settings(provider, environ={})
        assert settings.seed == 0
        assert settings.tol == pytest.approx(1e-9)
        assert settings.jobs == 1

    def test_yaml_layer(self, write_yaml):
        provider = ConfigProvider([write_yaml("run.yaml", {"engine": {"probes": 4}, "corpus": {"jobs": 3}})])
        provider.initialize()
        settings = ConfigHelpers.build_engine_settings(provider, environ={})
        assert settings.probes == 4
        assert settings.jobs == 3

    def test_environment_overrides_yaml(self, write_yaml):
        provider = ConfigProvider([write_yaml("run.yaml", {"engine": {"seed": 5}})])
        provider.initialize()
        settings = ConfigHelpers.build_engine_settings(
            provider, environ={"JETLAW_SEED": "11", "JETLAW_RANKING": "lex"}
        )
        assert settings.seed == 11
        assert settings.ranking == "lex"

    def test_cli_overrides_environment(self):
        settings = ConfigHelpers.build_engine_settings(
            cli_overrides={"seed": 3, "probes": None}, environ={"JETLAW_SEED": "11"}
        )
        assert settings.seed == 3
        assert settings.probes == 16

    def test_empty_environment_values_ignored(self):
        assert ConfigHelpers.env_overrides({"JETLAW_PROBES": ""}) == {}

    def test_invalid_ranking(self):
        with pytest.raises(ConfigValidationError):
            ConfigHelpers.build_engine_settings(cli_overrides={"ranking": "revlex"}, environ={})

    def test_out_of_range_value(self):
        with pytest.raises(ConfigValidationError):
            ConfigHelpers.build_engine_settings(environ={"JETLAW_MAX_ORDER": "9"})

    def test_unknown_key(self, write_yaml):
        provider = ConfigProvider([write_yaml("run.yaml", {"engine": {"colour": "blue"}})])
        provider.initialize()
        with pytest.raises(ConfigValidationError, match="colour"):
            ConfigHelpers.build_engine_settings(provider, environ={})

    def test_settings_are_frozen(self):
        settings = EngineSettings()
        with pytest.raises(Exception):
            settings.seed = 4

    def test_logging_config(self, write_yaml):
        provider = ConfigProvider([write_yaml("run.yaml", {"logging": {"level": "WARNING"}})])
        provider.initialize()
        assert ConfigHelpers.get_logging_config(provider, verbose=False)["level"] == "WARNING"
        assert ConfigHelpers.get_logging_config(provider, verbose=True)["level"] == "DEBUG"
        assert ConfigHelpers.get_logging_config(None, verbose=False) == {"file_logging": False}


class TestLogging:
    def test_logger_requires_initialization(self):
        manager = LoggingManager()
        with pytest.raises(RuntimeError):
            manager.get_logger("jetlaw.cli")

    def test_initialization(self, tmp_path):
        manager = LoggingManager(
            {"level": "DEBUG", "file_logging": True, "log_dir": str(tmp_path / "logs")}
        )
        manager.initialize_logging()
        try:
            logger = manager.get_logger("jetlaw.cli")
            assert logger.name == "jetlaw.cli"
            assert logging.getLogger().level == logging.DEBUG
            logger.debug("hello")
            assert (tmp_path / "logs" / "jetlaw.log").exists()
        finally:
            for handler in list(logging.getLogger().handlers):
                handler.close()
                logging.getLogger().removeHandler(handler)

    def test_log_event_is_sorted_json(self, caplog):
        logger = logging.getLogger("jetlaw.corpus")
        with caplog.at_level(logging.INFO, logger="jetlaw.corpus"):
            log_event(logger, "check_done", result="verified", file="heat.clw")
        record = caplog.records[-1]
        assert record.levelno == logging.INFO
        payload = json.loads(record.getMessage())
        assert payload == {"event": "check_done", "file": "heat.clw", "result": "verified"}
        assert record.getMessage().index('"event"') < record.getMessage().index('"file"')
