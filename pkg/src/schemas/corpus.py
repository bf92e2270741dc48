"""Schemas for corpus documents and chunks."""

from typing import Dict, FrozenSet, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.enums import FormatFlag


class CorpusRecord(BaseModel):
    """One line of a corpus JSONL file."""

    doc_id: str = Field(..., min_length=1)
    source: str
    page: int
    text: str
    index: Optional[int] = Field(None, ge=0)

    model_config = ConfigDict(extra="ignore")

    @field_validator("doc_id")
    @classmethod
    def validate_doc_id(cls, doc_id: str) -> str:
        if not doc_id.strip():
            raise ValueError("doc_id must be non-empty")
        return doc_id

    @field_validator("page")
    @classmethod
    def validate_page(cls, page: int) -> int:
        if page < 1:
            raise ValueError("page must be ≥ 1")
        return page


class ChunkFileRecord(CorpusRecord):
    """Chunk file line: corpus schema plus an optional pre-graded likelihood."""

    likelihood: Optional[float] = Field(None, ge=0.0, le=1.0)


class PageText(BaseModel):
    """Ordered record texts of a single page."""

    page: int = Field(..., ge=1)
    paragraphs: Tuple[str, ...]

    model_config = ConfigDict(frozen=True)

    @property
    def text(self) -> str:
        """Page text with records separated by a blank line."""
        return "\n\n".join(self.paragraphs)


class Document(BaseModel):
    """A source document with its pages in ascending order."""

    doc_id: str = Field(..., min_length=1)
    source: str
    pages: Tuple[PageText, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_page_order(self) -> "Document":
        numbers = [page.page for page in self.pages]
        if any(b <= a for a, b in zip(numbers, numbers[1:])):
            raise ValueError("page numbers must strictly increase within a document")
        return self

    @property
    def text_entries(self) -> int:
        """Number of record texts across all pages."""
        return sum(len(page.paragraphs) for page in self.pages)


class Chunk(BaseModel):
    """A span of document text with provenance metadata."""

    chunk_id: str
    doc_id: str
    source: str
    page: int = Field(..., ge=1)
    index: int = Field(..., ge=0)
    text: str
    format_flags: FrozenSet[FormatFlag] = frozenset()

    model_config = ConfigDict(frozen=True)

    @staticmethod
    def make_id(doc_id: str, page: int, index: int) -> str:
        """Build the canonical chunk id."""
        return f"{doc_id}:{page}:{index}"

    @field_validator("text")
    @classmethod
    def validate_text(cls, text: str) -> str:
        if not text.strip():
            raise ValueError("chunk text must be non-empty")
        return text

    @model_validator(mode="after")
    def validate_chunk_id(self) -> "Chunk":
        if self.chunk_id != self.make_id(self.doc_id, self.page, self.index):
            raise ValueError(f"chunk_id {self.chunk_id!r} does not match its parts")
        return self

    @classmethod
    def build(
        cls,
        doc_id: str,
        source: str,
        page: int,
        index: int,
        text: str,
        format_flags: FrozenSet[FormatFlag] = frozenset(),
    ) -> "Chunk":
        """Create a chunk with its id derived from the parts."""
        return cls(
            chunk_id=cls.make_id(doc_id, page, index),
            doc_id=doc_id,
            source=source,
            page=page,
            index=index,
            text=text,
            format_flags=format_flags,
        )


class ChunkRecord(BaseModel):
    """A chunk loaded from a chunk file, with its optional likelihood."""

    chunk: Chunk
    likelihood: Optional[float] = None

    model_config = ConfigDict(frozen=True)


class CorpusStats(BaseModel):
    """Ingest statistics."""

    documents: int
    pages: int
    chunks: int
    bulleted_chunks: int
    chunks_per_source: Dict[str, int]
    min_chunk_chars: int
    mean_chunk_chars: float
    max_chunk_chars: int
