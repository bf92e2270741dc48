"""Chat completion providers and the LLM-graded likelihood estimator."""

import asyncio
import hashlib
import logging
import re
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

import httpx

from src.core.config import ProviderConfig
from src.core.exceptions import (
    AuthenticationError, EmptyResponseError, ProviderError, ProviderTransportError
)
from src.models.enums import GradeLabel, ProviderKind, RunMode
from src.schemas.corpus import Chunk
from src.schemas.llm import CompletionRequest, CompletionResponse
from src.services.promptkit import render_grading_prompt
from src.templates.prompt_templates import PromptTemplates

logger = logging.getLogger(__name__)

FALLBACK_LIKELIHOOD = GradeLabel.MEDIUM.likelihood

_LABEL_PATTERN = re.compile(r"\b(HIGH|MEDIUM|LOW)\b", re.IGNORECASE)
_TRANSIENT_STATUS = {408, 409, 425, 429, 500, 502, 503, 504}


class BaseProvider(ABC):
    """Chat completion backend."""

    provider_id: str = "base"

    @abstractmethod
    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        """Return the first choice text for a request."""


class OpenAICompatibleProvider(BaseProvider):
    """OpenAI-compatible /chat/completions client with one retry on transient failure."""

    provider_id = "openai"

    def __init__(
        self,
        config: ProviderConfig,
        transport: Optional[httpx.AsyncBaseTransport] = None,
        max_retries: int = 1,
    ):
        self.config = config
        self.url = f"{config.endpoint.rstrip('/')}/chat/completions"
        self.max_retries = max_retries
        self._transport = transport

    def _payload(self, request: CompletionRequest) -> dict:
        messages = []
        if request.system:
            messages.append({"role": "system", "content": request.system})
        messages.append({"role": "user", "content": request.user})
        return {
            "model": request.model,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }

    async def _post(self, payload: dict, api_key: str) -> httpx.Response:
        async with httpx.AsyncClient(
            timeout=self.config.timeout_seconds, transport=self._transport
        ) as client:
            return await client.post(
                self.url,
                json=payload,
                headers={
                    "Authorization": f"Bearer {api_key}",
                    "Content-Type": "application/json",
                },
            )

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        """
        Send a chat completion request.

        Raises:
            AuthenticationError: credential missing (before any network call) or rejected
            ProviderTransportError: transport failure, 429 or 5xx persisting after retry
            EmptyResponseError: first choice has no text
        """
        secret = self.config.api_key()
        if secret is None:
            raise AuthenticationError(
                f"credential environment variable {self.config.api_key_env} is not set"
            )

        payload = self._payload(request)
        last_error = ""
        for attempt in range(self.max_retries + 1):
            if attempt:
                delay = self.config.retry_backoff_seconds * (2 ** (attempt - 1))
                logger.warning(f"Retrying chat completion in {delay:.2f}s after: {last_error}")
                await asyncio.sleep(delay)

            try:
                response = await self._post(payload, secret.get_secret_value())
            except httpx.TransportError as e:
                last_error = f"{type(e).__name__}: {e}"
                continue

            if response.status_code in (401, 403):
                raise AuthenticationError(
                    f"provider rejected the credential (HTTP {response.status_code})"
                )
            if response.status_code in _TRANSIENT_STATUS:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.is_error:
                raise ProviderError(f"provider returned HTTP {response.status_code}")

            return self._parse(response)

        logger.error(f"Chat completion failed after {self.max_retries + 1} attempts: {last_error}")
        raise ProviderTransportError(f"chat completion failed after retry: {last_error}")

    def _parse(self, response: httpx.Response) -> CompletionResponse:
        try:
            data = response.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise ProviderError("provider returned a malformed completion body") from e

        if not isinstance(text, str) or not text.strip():
            raise EmptyResponseError("empty response")
        return CompletionResponse(text=text.strip(), provider_id=self.provider_id)


class MockProvider(BaseProvider):
    """
    Deterministic offline provider.

    Replies come from a seeded table keyed by a hash of the request, so the
    same request always gets the same reply regardless of call order or
    concurrency. A ``script`` of replies, if given, is served first in call
    order (test use).
    """

    provider_id = "mock"

    GRADING_TABLE = ("HIGH", "MEDIUM", "LOW")
    JUDGE_TABLE = ("YES", "NO")

    def __init__(self, seed: int = 0, script: Optional[Sequence[str]] = None):
        self.seed = seed
        self._script = list(script or [])
        self.calls: List[CompletionRequest] = []

    def _request_hash(self, request: CompletionRequest) -> int:
        key = "\x1f".join([str(self.seed), request.model, request.system or "", request.user])
        return int(hashlib.sha256(key.encode("utf-8")).hexdigest()[:16], 16)

    def _table_reply(self, request: CompletionRequest) -> str:
        h = self._request_hash(request)
        if request.system == PromptTemplates.GRADING_SYSTEM:
            return self.GRADING_TABLE[h % len(self.GRADING_TABLE)]
        if request.system == PromptTemplates.JUDGE_SYSTEM:
            return self.JUDGE_TABLE[h % len(self.JUDGE_TABLE)]
        return self._echo_first_chunk(request.user, h)

    @staticmethod
    def _echo_first_chunk(prompt: str, h: int) -> str:
        for line in prompt.splitlines():
            if line.startswith("- "):
                return line[2:].split(" Source: ")[0].strip()
        return f"mock answer {h % 10000:04d}"

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        self.calls.append(request)
        text = self._script.pop(0) if self._script else self._table_reply(request)
        if not text.strip():
            raise EmptyResponseError("empty response")
        return CompletionResponse(text=text, provider_id=self.provider_id)


class ConcurrencyLimitedProvider(BaseProvider):
    """Shares one in-flight cap across every caller holding this instance."""

    def __init__(self, inner: BaseProvider, max_in_flight: int):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be ≥ 1")
        self.inner = inner
        self.max_in_flight = max_in_flight
        self._semaphore = asyncio.Semaphore(max_in_flight)

    @property
    def provider_id(self) -> str:
        return self.inner.provider_id

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        async with self._semaphore:
            return await self.inner.complete(request)


def get_provider(
    config: ProviderConfig,
    mode: RunMode = RunMode.LLM,
    transport: Optional[httpx.AsyncBaseTransport] = None,
) -> BaseProvider:
    """Mock provider in MOCK mode or when configured, else the OpenAI-compatible client."""
    if mode == RunMode.MOCK or config.kind == ProviderKind.MOCK:
        return MockProvider(seed=config.mock_seed)
    return OpenAICompatibleProvider(config, transport=transport)


def parse_label(text: str) -> Optional[GradeLabel]:
    """First whole-word HIGH/MEDIUM/LOW, case-insensitive."""
    match = _LABEL_PATTERN.search(text)
    return GradeLabel(match.group(1).upper()) if match else None


class LikelihoodGrader:
    """Asks the model how likely a chunk yields a good answer and maps the label to a number."""

    def __init__(self, provider: BaseProvider, model: str, max_in_flight: int = 4, max_tokens: int = 16):
        self.provider = provider
        self.model = model
        self.max_in_flight = max_in_flight
        self.max_tokens = max_tokens

    async def grade_likelihood(self, question: str, chunk: Chunk) -> float:
        """HIGH 0.8, MEDIUM 0.5, LOW 0.2; unparseable twice falls back to 0.5."""
        system, user = render_grading_prompt(question, chunk)
        request = CompletionRequest(
            model=self.model,
            system=system,
            user=user,
            temperature=0.0,
            max_tokens=self.max_tokens,
        )

        for attempt in range(2):
            response = await self.provider.complete(request)
            label = parse_label(response.text)
            if label is not None:
                return label.likelihood
            logger.debug(f"Unparseable grade for {chunk.chunk_id} (attempt {attempt + 1}): {response.text!r}")

        logger.warning(
            f"Could not parse a likelihood label for chunk {chunk.chunk_id}; "
            f"falling back to {FALLBACK_LIKELIHOOD}"
        )
        return FALLBACK_LIKELIHOOD

    async def grade_many(self, question: str, chunks: Sequence[Chunk]) -> List[float]:
        """Grade concurrently up to max_in_flight; results keep input order."""
        semaphore = asyncio.Semaphore(self.max_in_flight)

        async def _grade(chunk: Chunk) -> float:
            async with semaphore:
                return await self.grade_likelihood(question, chunk)

        return list(await asyncio.gather(*(_grade(chunk) for chunk in chunks)))
