"""Pipeline configuration loading and precedence."""

import logging

import pytest

from src.core.config import load_pipeline_config, resolve_config_path, settings
from src.core.exceptions import ConfigError
from src.models.enums import PriorKind, RunMode
from src.utils.logging import setup_logging

CONFIG = """
corpus_path = "corpus.jsonl"
top_n = 3
mode = "MOCK"

[prior]
threshold = 0.6
enabled_priors = ["PAGE", "SOURCE"]

[[prior.page_tiers]]
max_page = 5
prior = 0.8

[[prior.page_tiers]]
prior = 0.4

[prior.source_reputation]
"Daily Planet" = 0.9

[provider]
model = "gpt-4o-mini"
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "brag.toml"
    path.write_text(CONFIG, encoding="utf-8")
    return path


def test_defaults_without_file():
    cfg = load_pipeline_config()

    assert cfg.dimension == 256
    assert cfg.top_n == 5
    assert cfg.max_chars == 1200
    assert cfg.mode == RunMode.MOCK
    assert cfg.prior.threshold == 0.5
    assert cfg.prior.enabled_priors == frozenset({PriorKind.SOURCE})


def test_file_values_are_loaded(config_file):
    cfg = load_pipeline_config(str(config_file))

    assert cfg.corpus_path == "corpus.jsonl"
    assert cfg.top_n == 3
    assert cfg.prior.threshold == 0.6
    assert [tier.max_page for tier in cfg.prior.page_tiers] == [5, None]
    assert cfg.prior.source_reputation == {"Daily Planet": 0.9}
    assert cfg.provider.model == "gpt-4o-mini"


def test_overrides_beat_file(config_file):
    cfg = load_pipeline_config(str(config_file), {"prior": {"threshold": 0.7}, "top_n": 9})

    assert cfg.prior.threshold == 0.7
    assert cfg.top_n == 9
    assert cfg.prior.enabled_priors == frozenset({PriorKind.PAGE, PriorKind.SOURCE})


def test_config_path_from_environment(config_file, monkeypatch):
    monkeypatch.setenv("BRAG_CONFIG", str(config_file))

    assert resolve_config_path() == config_file
    assert load_pipeline_config().top_n == 3


def test_environment_values_below_file(config_file, monkeypatch):
    monkeypatch.setenv("BRAG_DIMENSION", "64")
    monkeypatch.setenv("BRAG_TOP_N", "7")

    cfg = load_pipeline_config(str(config_file))

    assert cfg.dimension == 64
    assert cfg.top_n == 3


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_pipeline_config(str(tmp_path / "nope.toml"))


def test_invalid_toml_is_config_error(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("top_n = = 3\n", encoding="utf-8")

    with pytest.raises(ConfigError, match="invalid config file"):
        load_pipeline_config(str(path))


@pytest.mark.parametrize(
    "overrides",
    [{"top_n": 0}, {"dimension": 1}, {"prior": {"threshold": 1.0}}, {"mode": "REMOTE"}],
)
def test_invalid_values_are_config_errors(overrides):
    with pytest.raises(ConfigError, match="invalid configuration"):
        load_pipeline_config(overrides=overrides)


def test_api_key_is_read_from_named_variable(monkeypatch):
    monkeypatch.setenv("MY_LLM_KEY", "secret-value")

    cfg = load_pipeline_config(overrides={"provider": {"api_key_env": "MY_LLM_KEY"}})

    assert cfg.provider.api_key().get_secret_value() == "secret-value"
    assert "secret-value" not in cfg.model_dump_json()


def test_debug_setting_forces_debug_logging(monkeypatch):
    monkeypatch.setattr(settings, "DEBUG", True)
    monkeypatch.setattr(settings, "LOG_TO_FILE", False)

    setup_logging()

    assert logging.getLogger().level == logging.DEBUG
    setup_logging(settings.LOG_LEVEL)
