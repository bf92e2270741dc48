"""Schemas for Bayesian chunk scoring."""

from typing import Dict, FrozenSet, List, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.enums import PriorKind
from src.schemas.corpus import Chunk

# Worked-example reputation table: reputed outlets high, the unverified one medium.
DEFAULT_SOURCE_REPUTATION: Dict[str, float] = {
    "Times of India": 0.7,
    "The WIRE": 0.7,
    "Arif Media": 0.5,
}


class PageTier(BaseModel):
    """Pages up to ``max_page`` get ``prior``; ``max_page=None`` is the catch-all."""

    max_page: Optional[int] = Field(None, ge=1)
    prior: float = Field(..., ge=0.0, le=1.0)

    model_config = ConfigDict(frozen=True)


def default_page_tiers() -> List[PageTier]:
    return [PageTier(max_page=10, prior=0.7), PageTier(max_page=None, prior=0.5)]


class PriorConfig(BaseModel):
    """Metadata prior models, their composition and the inclusion threshold."""

    page_tiers: List[PageTier] = Field(default_factory=default_page_tiers)
    source_reputation: Dict[str, float] = Field(
        default_factory=lambda: dict(DEFAULT_SOURCE_REPUTATION)
    )
    default_source_prior: float = Field(0.5, ge=0.0, le=1.0)
    format_bonus_prior: float = Field(0.7, ge=0.0, le=1.0)
    format_patterns: List[str] = Field(default_factory=list)
    enabled_priors: FrozenSet[PriorKind] = frozenset({PriorKind.SOURCE})
    weights: Dict[PriorKind, float] = Field(
        default_factory=lambda: {kind: 1.0 for kind in PriorKind}
    )
    threshold: float = Field(0.5, gt=0.0, lt=1.0)

    model_config = ConfigDict(frozen=True)

    @field_validator("page_tiers")
    @classmethod
    def validate_page_tiers(cls, tiers: List[PageTier]) -> List[PageTier]:
        if not tiers:
            raise ValueError("page_tiers must not be empty")
        if tiers[-1].max_page is not None:
            raise ValueError("last page tier must be the catch-all (no max_page)")
        bounded = [tier.max_page for tier in tiers[:-1]]
        if any(bound is None for bound in bounded):
            raise ValueError("only the last page tier may omit max_page")
        if any(b <= a for a, b in zip(bounded, bounded[1:])):
            raise ValueError("page tier max_page values must strictly increase")
        return tiers

    @field_validator("source_reputation")
    @classmethod
    def validate_source_reputation(cls, reputation: Dict[str, float]) -> Dict[str, float]:
        for source, prior in reputation.items():
            if not 0.0 <= prior <= 1.0:
                raise ValueError(f"reputation prior for {source!r} must be in [0, 1]")
        return reputation

    @field_validator("enabled_priors")
    @classmethod
    def validate_enabled_priors(cls, enabled: FrozenSet[PriorKind]) -> FrozenSet[PriorKind]:
        if not enabled:
            raise ValueError("at least one prior must be enabled")
        return enabled

    @model_validator(mode="after")
    def validate_weights(self) -> "PriorConfig":
        for kind, weight in self.weights.items():
            if weight <= 0:
                raise ValueError(f"weight for {kind.value} must be > 0")
        missing = [kind.value for kind in self.enabled_priors if kind not in self.weights]
        if missing:
            raise ValueError(f"missing weights for enabled priors: {', '.join(sorted(missing))}")
        return self


class ScoredChunk(BaseModel):
    """A chunk with its likelihood, prior, posterior and inclusion decision."""

    chunk: Chunk
    likelihood: float = Field(..., ge=0.0, le=1.0)
    prior: float = Field(..., ge=0.0, le=1.0)
    posterior: float = Field(..., ge=0.0, le=1.0)
    included: bool
    prior_components: Dict[PriorKind, float] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)

    @property
    def chunk_id(self) -> str:
        return self.chunk.chunk_id
