"""Schemas for chat completion requests and responses."""

from typing import Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator


class CompletionRequest(BaseModel):
    """A single-turn chat completion request."""

    model: str
    system: Optional[str] = None
    user: str
    temperature: float = Field(0.0, ge=0.0)
    max_tokens: int = Field(256, ge=1)

    model_config = ConfigDict(frozen=True)

    @field_validator("user")
    @classmethod
    def validate_user(cls, user: str) -> str:
        if not user.strip():
            raise ValueError("user message must be non-empty")
        return user


class CompletionResponse(BaseModel):
    """First-choice text returned by a provider."""

    text: str
    provider_id: str

    model_config = ConfigDict(frozen=True)
