"""Corpus loading, paragraph chunking and format detection."""

import json
import logging
import re
from collections import Counter
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterator, List, Sequence, Tuple, Type, TypeVar

from pydantic import ValidationError

from src.core.exceptions import CorpusError
from src.models.enums import FormatFlag
from src.schemas.corpus import (
    Chunk, ChunkFileRecord, ChunkRecord, CorpusRecord, CorpusStats, Document, PageText
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_CHARS = 1200
MIN_MAX_CHARS = 64

_PARAGRAPH_BREAK = re.compile(r"\n\s*\n")
_BULLET_LINE = re.compile(r"^\s*(?:[-*•]|\d+\.)")
_SENTENCE_TERMINATORS = ".!?"

RecordT = TypeVar("RecordT", bound=CorpusRecord)


def _validation_message(error: ValidationError) -> str:
    """Flatten a pydantic error into one line, without the 'Value error, ' prefix."""
    parts = []
    for item in error.errors():
        location = ".".join(str(loc) for loc in item["loc"])
        message = item["msg"].removeprefix("Value error, ")
        parts.append(f"{location}: {message}" if location else message)
    return "; ".join(parts)


def _iter_records(path: str | Path, model: Type[RecordT]) -> Iterator[Tuple[int, RecordT]]:
    """Yield (line number, validated record) for every non-blank JSONL line."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except (OSError, UnicodeDecodeError) as e:
        raise CorpusError(f"cannot read {path}: {e}") from e

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusError(f"malformed JSON: {e.msg}", line=line_no) from e
        if not isinstance(raw, dict):
            raise CorpusError("record must be a JSON object", line=line_no)
        try:
            yield line_no, model.model_validate(raw)
        except ValidationError as e:
            raise CorpusError(_validation_message(e), line=line_no) from e


class _IndexAllocator:
    """Assigns record indices per (doc_id, page) and rejects duplicates."""

    def __init__(self):
        self._seen: Dict[Tuple[str, int], set] = {}

    def allocate(self, record: CorpusRecord, line_no: int) -> int:
        key = (record.doc_id, record.page)
        used = self._seen.setdefault(key, set())
        index = record.index if record.index is not None else (max(used) + 1 if used else 0)
        if index in used:
            raise CorpusError(
                f"duplicate record ({record.doc_id}, page {record.page}, index {index})",
                line=line_no,
            )
        used.add(index)
        return index


def load_corpus(path: str | Path) -> List[Document]:
    """
    Load a JSONL corpus and group its records into documents.

    Documents keep first-appearance order; pages ascend; records of one page
    are ordered by index (explicit, or next free ordinal when absent).
    """
    allocator = _IndexAllocator()
    sources: Dict[str, str] = {}
    pages: Dict[str, Dict[int, List[Tuple[int, str]]]] = {}

    for line_no, record in _iter_records(path, CorpusRecord):
        known_source = sources.setdefault(record.doc_id, record.source)
        if known_source != record.source:
            raise CorpusError(
                f"doc_id {record.doc_id!r} has conflicting sources "
                f"{known_source!r} and {record.source!r}",
                line=line_no,
            )
        index = allocator.allocate(record, line_no)
        pages.setdefault(record.doc_id, {}).setdefault(record.page, []).append((index, record.text))

    documents = []
    for doc_id, doc_pages in pages.items():
        page_texts = tuple(
            PageText(
                page=page,
                paragraphs=tuple(text for _, text in sorted(entries, key=lambda entry: entry[0])),
            )
            for page, entries in sorted(doc_pages.items())
        )
        documents.append(Document(doc_id=doc_id, source=sources[doc_id], pages=page_texts))

    logger.info(f"Loaded {len(documents)} documents from {path}")
    return documents


def load_chunk_file(
    path: str | Path,
    format_patterns: Sequence[str] = (),
) -> List[ChunkRecord]:
    """Load a chunk file: one chunk per record, with an optional likelihood."""
    allocator = _IndexAllocator()
    records = []

    for line_no, record in _iter_records(path, ChunkFileRecord):
        index = allocator.allocate(record, line_no)
        try:
            chunk = Chunk.build(
                doc_id=record.doc_id,
                source=record.source,
                page=record.page,
                index=index,
                text=record.text.strip(),
                format_flags=detect_format(record.text, format_patterns),
            )
        except ValidationError as e:
            raise CorpusError(_validation_message(e), line=line_no) from e
        records.append(ChunkRecord(chunk=chunk, likelihood=record.likelihood))

    logger.info(f"Loaded {len(records)} chunks from {path}")
    return records


@lru_cache(maxsize=64)
def _compile_patterns(patterns: Tuple[str, ...]) -> Tuple[re.Pattern, ...]:
    try:
        return tuple(re.compile(pattern, re.MULTILINE) for pattern in patterns)
    except re.error as e:
        raise CorpusError(f"invalid format pattern: {e}") from e


def detect_format(text: str, format_patterns: Sequence[str] = ()) -> frozenset:
    """
    Detect formatting traits of a chunk.

    BULLETED needs at least two lines starting with "-", "*", "•" or "<digits>."
    so a single stray dash does not count. ORG_FORMATTED is set when any
    configured organisation-specific pattern matches.
    """
    flags = set()

    bullet_lines = sum(1 for line in text.splitlines() if _BULLET_LINE.match(line))
    if bullet_lines >= 2:
        flags.add(FormatFlag.BULLETED)

    if format_patterns and any(
        pattern.search(text) for pattern in _compile_patterns(tuple(format_patterns))
    ):
        flags.add(FormatFlag.ORG_FORMATTED)

    return frozenset(flags)


def _split_paragraphs(text: str) -> List[str]:
    paragraphs = (paragraph.strip() for paragraph in _PARAGRAPH_BREAK.split(text))
    return [paragraph for paragraph in paragraphs if paragraph]


def _split_long_paragraph(paragraph: str, max_chars: int) -> List[str]:
    """Cut after the last sentence terminator inside the window, else hard cut."""
    pieces = []
    rest = paragraph
    while len(rest) > max_chars:
        window = rest[:max_chars]
        cut = max(window.rfind(terminator) for terminator in _SENTENCE_TERMINATORS) + 1
        if cut <= 0:
            cut = max_chars
        pieces.append(rest[:cut])
        rest = rest[cut:]
    if rest:
        pieces.append(rest)
    return pieces


def chunk_document(
    doc: Document,
    max_chars: int = DEFAULT_MAX_CHARS,
    format_patterns: Sequence[str] = (),
) -> List[Chunk]:
    """Split every page of a document into paragraph chunks."""
    if max_chars < MIN_MAX_CHARS:
        raise CorpusError(f"max_chars must be ≥ {MIN_MAX_CHARS}, got {max_chars}")

    chunks = []
    for page in doc.pages:
        index = 0
        for paragraph in _split_paragraphs(page.text):
            for piece in _split_long_paragraph(paragraph, max_chars):
                if not piece.strip():
                    continue
                chunks.append(Chunk.build(
                    doc_id=doc.doc_id,
                    source=doc.source,
                    page=page.page,
                    index=index,
                    text=piece,
                    format_flags=detect_format(piece, format_patterns),
                ))
                index += 1
    return chunks


def chunk_corpus(
    documents: Sequence[Document],
    max_chars: int = DEFAULT_MAX_CHARS,
    format_patterns: Sequence[str] = (),
) -> List[Chunk]:
    """Chunk every document, keeping corpus order."""
    chunks = []
    for doc in documents:
        chunks.extend(chunk_document(doc, max_chars, format_patterns))
    return chunks


def corpus_statistics(documents: Sequence[Document], chunks: Sequence[Chunk]) -> CorpusStats:
    """Summarise a chunked corpus for ingest reporting."""
    lengths = [len(chunk.text) for chunk in chunks]
    per_source = Counter(chunk.source for chunk in chunks)
    return CorpusStats(
        documents=len(documents),
        pages=sum(len(doc.pages) for doc in documents),
        chunks=len(chunks),
        bulleted_chunks=sum(1 for chunk in chunks if FormatFlag.BULLETED in chunk.format_flags),
        chunks_per_source=dict(sorted(per_source.items())),
        min_chunk_chars=min(lengths) if lengths else 0,
        mean_chunk_chars=round(sum(lengths) / len(lengths), 2) if lengths else 0.0,
        max_chunk_chars=max(lengths) if lengths else 0,
    )
