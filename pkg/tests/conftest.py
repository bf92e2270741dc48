"""Shared fixtures."""

import asyncio
from pathlib import Path

import pytest

from src.schemas.llm import CompletionRequest, CompletionResponse
from src.schemas.scoring import PriorConfig
from src.services.corpus import load_chunk_file
from src.services.llm_client import BaseProvider, MockProvider

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"

PHOGAT_QUESTION = "What happened to India in women's freestyle Olympics?"


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    """Keep host configuration and credentials out of every test."""
    for name in ("BRAG_CONFIG", "BRAG_MODE", "BRAG_TOP_N", "BRAG_DIMENSION", "OPENAI_API_KEY"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def phogat_path() -> Path:
    return FIXTURES / "phogat.jsonl"


@pytest.fixture
def corpus_path() -> Path:
    return FIXTURES / "corpus.jsonl"


@pytest.fixture
def phogat_records(phogat_path):
    return load_chunk_file(phogat_path)


@pytest.fixture
def phogat_chunks(phogat_records):
    return [record.chunk for record in phogat_records]


@pytest.fixture
def reputation_priors() -> PriorConfig:
    """Source reputation only, threshold 0.5."""
    return PriorConfig()


def read_golden(name: str) -> str:
    return (GOLDEN / name).read_text(encoding="utf-8")


def write_jsonl(path: Path, lines) -> Path:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class CountingProvider(BaseProvider):
    """Mock replies with a short delay, recording how many requests overlap."""

    provider_id = "counting"

    def __init__(self, seed: int = 1, delay: float = 0.01):
        self.inner = MockProvider(seed=seed)
        self.delay = delay
        self.in_flight = 0
        self.peak = 0
        self.calls = 0

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        self.in_flight += 1
        self.calls += 1
        self.peak = max(self.peak, self.in_flight)
        try:
            await asyncio.sleep(self.delay)
            return await self.inner.complete(request)
        finally:
            self.in_flight -= 1
