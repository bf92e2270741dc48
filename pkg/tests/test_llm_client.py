"""Chat providers, the mock provider and LLM likelihood grading."""

import asyncio
import json
import logging

import httpx
import pytest

from src.core.config import ProviderConfig
from src.core.exceptions import (
    AuthenticationError, EmptyResponseError, ProviderError, ProviderTransportError
)
from src.models.enums import GradeLabel, ProviderKind, RunMode
from src.schemas.corpus import Chunk
from src.schemas.llm import CompletionRequest
from src.services.llm_client import (
    ConcurrencyLimitedProvider, LikelihoodGrader, MockProvider, OpenAICompatibleProvider,
    get_provider, parse_label
)
from src.services.promptkit import render_grading_prompt
from tests.conftest import PHOGAT_QUESTION, CountingProvider

SECRET = "sk-test-secret-value"


def _completion(text: str) -> dict:
    return {"choices": [{"message": {"role": "assistant", "content": text}}]}


def _provider(handler, **config) -> OpenAICompatibleProvider:
    cfg = ProviderConfig(endpoint="https://llm.test/v1", retry_backoff_seconds=0.0, **config)
    return OpenAICompatibleProvider(cfg, transport=httpx.MockTransport(handler))


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", SECRET)
    return SECRET


REQUEST = CompletionRequest(model="gpt-test", system="sys", user="hello")


# ===== OPENAI-COMPATIBLE PROVIDER =====

async def test_complete_posts_chat_payload(api_key):
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["auth"] = request.headers["Authorization"]
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json=_completion("  an answer  "))

    response = await _provider(handler).complete(REQUEST)

    assert response.text == "an answer"
    assert seen["url"] == "https://llm.test/v1/chat/completions"
    assert seen["auth"] == f"Bearer {SECRET}"
    assert seen["body"]["messages"] == [
        {"role": "system", "content": "sys"},
        {"role": "user", "content": "hello"},
    ]
    assert seen["body"]["temperature"] == 0.0


async def test_missing_credential_fails_before_network():
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        return httpx.Response(200, json=_completion("x"))

    with pytest.raises(AuthenticationError, match="OPENAI_API_KEY"):
        await _provider(handler).complete(REQUEST)
    assert calls == []


@pytest.mark.parametrize("status", [401, 403])
async def test_rejected_credential_is_authentication_error(api_key, status):
    provider = _provider(lambda request: httpx.Response(status, json={"error": "nope"}))

    with pytest.raises(AuthenticationError) as exc:
        await provider.complete(REQUEST)
    assert SECRET not in str(exc.value)


async def test_transient_failure_is_retried_once(api_key, caplog):
    attempts = []

    def handler(request: httpx.Request) -> httpx.Response:
        attempts.append(request)
        if len(attempts) == 1:
            return httpx.Response(503)
        return httpx.Response(200, json=_completion("recovered"))

    with caplog.at_level(logging.WARNING):
        response = await _provider(handler).complete(REQUEST)

    assert response.text == "recovered"
    assert len(attempts) == 2
    assert "Retrying" in caplog.text
    assert SECRET not in caplog.text


async def test_persistent_transport_failure_raises_after_retry(api_key):
    attempts = []

    def handler(request: httpx.Request) -> httpx.Response:
        attempts.append(request)
        raise httpx.ConnectError("connection refused", request=request)

    with pytest.raises(ProviderTransportError):
        await _provider(handler).complete(REQUEST)
    assert len(attempts) == 2


async def test_rate_limit_persisting_raises_transport_error(api_key):
    with pytest.raises(ProviderTransportError, match="429"):
        await _provider(lambda request: httpx.Response(429)).complete(REQUEST)


async def test_client_error_is_not_retried(api_key):
    attempts = []

    def handler(request: httpx.Request) -> httpx.Response:
        attempts.append(request)
        return httpx.Response(400, json={"error": "bad request"})

    with pytest.raises(ProviderError, match="400"):
        await _provider(handler).complete(REQUEST)
    assert len(attempts) == 1


async def test_empty_completion_is_empty_response_error(api_key):
    with pytest.raises(EmptyResponseError, match="empty response"):
        await _provider(lambda request: httpx.Response(200, json=_completion("   "))).complete(REQUEST)


async def test_malformed_body_is_provider_error(api_key):
    with pytest.raises(ProviderError, match="malformed"):
        await _provider(lambda request: httpx.Response(200, json={"choices": []})).complete(REQUEST)


# ===== MOCK PROVIDER =====

async def test_mock_provider_is_deterministic_per_request():
    system, user = render_grading_prompt(PHOGAT_QUESTION, _any_chunk())
    request = CompletionRequest(model="m", system=system, user=user)

    first = await MockProvider(seed=3).complete(request)
    second = await MockProvider(seed=3).complete(request)

    assert first.text == second.text
    assert first.text in MockProvider.GRADING_TABLE


async def test_mock_provider_serves_script_first():
    provider = MockProvider(script=["scripted reply"])

    first = await provider.complete(REQUEST)
    second = await provider.complete(REQUEST)

    assert first.text == "scripted reply"
    assert second.text != "scripted reply"
    assert len(provider.calls) == 2


async def test_mock_provider_echoes_first_chunk_for_answer_prompts():
    prompt = "Header\n\nText chunks:\n\n- The first chunk text. Source: The WIRE\n- Second. Source: X\n"

    response = await MockProvider().complete(CompletionRequest(model="m", user=prompt))

    assert response.text == "The first chunk text."


async def test_mock_provider_empty_script_reply_raises():
    with pytest.raises(EmptyResponseError):
        await MockProvider(script=[""]).complete(REQUEST)


def test_get_provider_selects_backend():
    assert isinstance(get_provider(ProviderConfig(), RunMode.MOCK), MockProvider)
    assert isinstance(get_provider(ProviderConfig(kind=ProviderKind.MOCK), RunMode.LLM), MockProvider)
    assert isinstance(get_provider(ProviderConfig(), RunMode.LLM), OpenAICompatibleProvider)


async def test_concurrency_limited_provider_caps_overlapping_calls():
    inner = CountingProvider()
    provider = ConcurrencyLimitedProvider(inner, max_in_flight=3)
    requests = [CompletionRequest(model="m", user=f"question {i}") for i in range(10)]

    responses = await asyncio.gather(*(provider.complete(request) for request in requests))

    assert len(responses) == 10
    assert inner.calls == 10
    assert inner.peak == 3
    assert provider.provider_id == "counting"


def test_concurrency_limited_provider_rejects_zero_limit():
    with pytest.raises(ValueError):
        ConcurrencyLimitedProvider(MockProvider(), max_in_flight=0)


# ===== GRADING =====

def _any_chunk() -> Chunk:
    return Chunk.build(doc_id="toi", source="Times of India", page=1, index=0, text="Evidence text.")


@pytest.mark.parametrize(
    "text, label",
    [
        ("HIGH", GradeLabel.HIGH),
        ("  medium.", GradeLabel.MEDIUM),
        ("I would say low, maybe medium", GradeLabel.LOW),
        ("HIGHLY unclear", None),
        ("no idea", None),
    ],
)
def test_parse_label(text, label):
    assert parse_label(text) == label


@pytest.mark.parametrize("reply, expected", [("HIGH", 0.8), ("Medium", 0.5), ("low", 0.2)])
async def test_grade_likelihood_maps_labels(reply, expected):
    grader = LikelihoodGrader(MockProvider(script=[reply]), "m")

    assert await grader.grade_likelihood(PHOGAT_QUESTION, _any_chunk()) == expected


async def test_grade_likelihood_retries_then_falls_back(caplog):
    provider = MockProvider(script=["unsure", "still unsure"])
    grader = LikelihoodGrader(provider, "m")

    with caplog.at_level(logging.WARNING):
        value = await grader.grade_likelihood(PHOGAT_QUESTION, _any_chunk())

    assert value == 0.5
    assert len(provider.calls) == 2
    assert "falling back" in caplog.text


async def test_grade_likelihood_retry_can_recover():
    grader = LikelihoodGrader(MockProvider(script=["unsure", "HIGH"]), "m")

    assert await grader.grade_likelihood(PHOGAT_QUESTION, _any_chunk()) == 0.8


async def test_grade_many_keeps_input_order(phogat_chunks):
    grader = LikelihoodGrader(MockProvider(seed=5), "m", max_in_flight=2)

    values = await grader.grade_many(PHOGAT_QUESTION, phogat_chunks)
    expected = [await LikelihoodGrader(MockProvider(seed=5), "m").grade_likelihood(PHOGAT_QUESTION, chunk)
                for chunk in phogat_chunks]

    assert values == expected
