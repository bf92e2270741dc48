"""Application settings and pipeline configuration."""

import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, SecretStr, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict, TomlConfigSettingsSource

from src.core.exceptions import ConfigError
from src.models.enums import ProviderKind, RunMode
from src.schemas.scoring import PriorConfig

CONFIG_ENV_VAR = "BRAG_CONFIG"


class Settings(BaseSettings):
    """Process-level settings with environment variable loading."""

    PROJECT_NAME: str = "Bayesian Evidence RAG"
    VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Logging
    SERVICE_NAME: str = "brag"
    LOG_LEVEL: str = "INFO"
    LOG_TO_FILE: bool = False
    LOG_DIRECTORY: str = "./logs"
    LOG_MAX_BYTES: int = 10 * 1024 * 1024  # 10MB
    LOG_BACKUP_COUNT: int = 5

    @field_validator("LOG_LEVEL")
    def normalize_log_level(cls, v: str) -> str:
        """Accept lowercase level names."""
        return v.upper()

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


# ===== PIPELINE SECTIONS =====

class RetrievalConfig(BaseModel):
    """Tokenizer and optional remote embedding settings."""

    stopwords: List[str] = Field(default_factory=list)
    embedding_endpoint: Optional[str] = None
    embedding_timeout_seconds: float = Field(30.0, gt=0)

    model_config = ConfigDict(frozen=True)


class ProviderConfig(BaseModel):
    """Chat completion provider settings; the credential itself lives in the environment."""

    kind: ProviderKind = ProviderKind.OPENAI
    endpoint: str = "https://api.openai.com/v1"
    model: str = "gpt-3.5-turbo"
    api_key_env: str = "OPENAI_API_KEY"
    timeout_seconds: float = Field(30.0, gt=0)
    max_tokens: int = Field(256, ge=1)
    retry_backoff_seconds: float = Field(0.5, ge=0)
    max_in_flight: int = Field(4, ge=1)
    mock_seed: int = 0

    model_config = ConfigDict(frozen=True)

    def api_key(self) -> Optional[SecretStr]:
        """Read the credential from the configured environment variable."""
        value = os.getenv(self.api_key_env, "").strip()
        return SecretStr(value) if value else None


class GeneratorConfig(BaseModel):
    """Synthetic conflicting-evidence case generator settings."""

    conflicts_per_case: int = Field(1, ge=1, le=3)
    distractors_per_case: int = Field(1, ge=0, le=3)
    hard_case_ratio: float = Field(0.5, ge=0.0, le=1.0)
    reputed_sources: List[str] = Field(default_factory=lambda: ["Times of India", "The WIRE"])
    low_reputation_sources: List[str] = Field(
        default_factory=lambda: ["Arif Media", "Viral Daily", "Rumour Mill Post"]
    )

    model_config = ConfigDict(frozen=True)

    @field_validator("reputed_sources", "low_reputation_sources")
    @classmethod
    def validate_sources(cls, sources: List[str]) -> List[str]:
        if not sources:
            raise ValueError("source list must not be empty")
        return sources


class EvalConfig(BaseModel):
    """Evaluation run settings."""

    report_path: str = "eval_report.json"
    filter_enabled: bool = True

    model_config = ConfigDict(frozen=True)


class PipelineConfig(BaseSettings):
    """Everything one pipeline run needs, loaded from a single TOML file."""

    corpus_path: Optional[str] = None
    dimension: int = Field(256, ge=2)
    top_n: int = Field(5, ge=1)
    max_chars: int = Field(1200, ge=64)
    mode: RunMode = RunMode.MOCK
    retrieval: RetrievalConfig = Field(default_factory=RetrievalConfig)
    prior: PriorConfig = Field(default_factory=PriorConfig)
    provider: ProviderConfig = Field(default_factory=ProviderConfig)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)

    model_config = SettingsConfigDict(
        env_prefix="BRAG_",
        env_nested_delimiter="__",
        case_sensitive=False,
    )


def _deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Merge nested dicts; override values win."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def resolve_config_path(config_path: Optional[str] = None) -> Optional[Path]:
    """Explicit path first, then the BRAG_CONFIG environment variable."""
    raw = config_path or os.getenv(CONFIG_ENV_VAR, "").strip()
    return Path(raw) if raw else None


def load_pipeline_config(
    config_path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> PipelineConfig:
    """
    Load pipeline configuration.

    Precedence: overrides (command-line flags) > config file > BRAG_* env > defaults.
    """
    path = resolve_config_path(config_path)
    file_values: Dict[str, Any] = {}

    if path is not None:
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            file_values = TomlConfigSettingsSource(PipelineConfig, toml_file=path)()
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
            raise ConfigError(f"invalid config file {path}: {e}") from e

    merged = _deep_merge(file_values, overrides or {})
    try:
        return PipelineConfig(**merged)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(loc) for loc in error['loc'])}: {error['msg']}" for error in e.errors()
        )
        raise ConfigError(f"invalid configuration: {details}") from e


# Create global settings instance
settings = Settings()
