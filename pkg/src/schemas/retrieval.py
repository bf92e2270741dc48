"""Schemas for vector search results."""

from pydantic import BaseModel, ConfigDict, Field


class SearchHit(BaseModel):
    """One ranked search result."""

    chunk_id: str
    similarity: float = Field(..., ge=-1.0 - 1e-9, le=1.0 + 1e-9)

    model_config = ConfigDict(frozen=True)
