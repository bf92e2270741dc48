"""Priors, composition, posterior algebra and the strict threshold filter."""

import math
import random

import pytest

from src.core.exceptions import ScoringError
from src.models.enums import FormatFlag, PriorKind
from src.schemas.corpus import Chunk
from src.schemas.scoring import PageTier, PriorConfig
from src.services.bayes import (
    chunk_prior, compose_priors, filter_chunks, format_prior, lexical_likelihood,
    page_prior, posterior, score_chunks, source_prior
)
from tests.conftest import PHOGAT_QUESTION

SAMPLES = 10_000


def _chunk(source="Times of India", page=1, text="some evidence", flags=frozenset(), doc_id="d"):
    return Chunk.build(doc_id=doc_id, source=source, page=page, index=0, text=text, format_flags=flags)


# ===== WORKED EXAMPLE =====

def test_worked_example_posteriors(phogat_records, reputation_priors):
    chunks = [record.chunk for record in phogat_records]
    likelihoods = [record.likelihood for record in phogat_records]

    scored = score_chunks(PHOGAT_QUESTION, chunks, likelihoods, reputation_priors)

    assert [item.prior for item in scored] == [0.7, 0.5, 0.7]
    assert [item.posterior for item in scored] == pytest.approx([0.56, 0.25, 0.49], abs=1e-9)
    assert [item.included for item in scored] == [True, False, False]
    assert scored[0].prior_components == {PriorKind.SOURCE: 0.7}


def test_filter_chunks_is_stable_partition(phogat_records, reputation_priors):
    chunks = [record.chunk for record in phogat_records]
    scored = score_chunks(PHOGAT_QUESTION, chunks, [0.8, 0.5, 0.7], reputation_priors)

    included, excluded = filter_chunks(scored)

    assert [item.chunk.source for item in included] == ["Times of India"]
    assert [item.chunk.source for item in excluded] == ["Arif Media", "The WIRE"]


# ===== INDIVIDUAL PRIORS =====

@pytest.mark.parametrize("page, expected", [(1, 0.7), (10, 0.7), (11, 0.5), (500, 0.5)])
def test_page_prior_default_tiers(page, expected):
    assert page_prior(page, PriorConfig().page_tiers) == expected


def test_page_prior_custom_tiers_inclusive_bounds():
    tiers = [PageTier(max_page=2, prior=0.9), PageTier(max_page=5, prior=0.6), PageTier(prior=0.3)]

    assert [page_prior(page, tiers) for page in (1, 2, 3, 5, 6)] == [0.9, 0.9, 0.6, 0.6, 0.3]


def test_source_prior_falls_back_to_default():
    cfg = PriorConfig(default_source_prior=0.4)

    assert source_prior("The WIRE", cfg) == 0.7
    assert source_prior("Unknown Blog", cfg) == 0.4


def test_format_prior_bonus_for_bulleted_and_org_formatted():
    cfg = PriorConfig()

    assert format_prior(frozenset({FormatFlag.BULLETED}), cfg) == 0.7
    assert format_prior(frozenset({FormatFlag.ORG_FORMATTED}), cfg) == 0.7
    assert format_prior(frozenset(), cfg) == 0.5


def test_chunk_prior_composes_enabled_priors():
    cfg = PriorConfig(enabled_priors={PriorKind.PAGE, PriorKind.SOURCE})

    prior, components = chunk_prior(_chunk(source="Arif Media", page=3), cfg)

    assert components == {PriorKind.PAGE: 0.7, PriorKind.SOURCE: 0.5}
    assert prior == pytest.approx(math.sqrt(0.7 * 0.5))


# ===== COMPOSITION =====

def test_compose_single_prior_is_identity():
    assert compose_priors({PriorKind.SOURCE: 0.3}, {PriorKind.SOURCE: 2.0}) == 0.3


def test_compose_zero_prior_gives_zero():
    values = {PriorKind.PAGE: 0.0, PriorKind.SOURCE: 0.9}

    assert compose_priors(values, {kind: 1.0 for kind in PriorKind}) == 0.0


def test_compose_weighted_geometric_mean():
    values = {PriorKind.PAGE: 0.8, PriorKind.SOURCE: 0.2}
    weights = {PriorKind.PAGE: 3.0, PriorKind.SOURCE: 1.0}

    expected = math.exp((3 * math.log(0.8) + math.log(0.2)) / 4)
    assert compose_priors(values, weights) == pytest.approx(expected)


def test_compose_rejects_out_of_range_prior():
    with pytest.raises(ScoringError):
        compose_priors({PriorKind.SOURCE: 1.2}, {PriorKind.SOURCE: 1.0})


def test_compose_stays_between_min_and_max():
    rng = random.Random(11)
    kinds = PriorKind.ordered()
    for _ in range(SAMPLES):
        chosen = rng.sample(kinds, rng.randint(1, 3))
        values = {kind: rng.uniform(0.01, 1.0) for kind in chosen}
        weights = {kind: rng.uniform(0.1, 5.0) for kind in kinds}

        composed = compose_priors(values, weights)

        assert min(values.values()) <= composed <= max(values.values())


# ===== POSTERIOR ALGEBRA =====

def test_posterior_is_product_and_bounded():
    rng = random.Random(42)
    for _ in range(SAMPLES):
        likelihood, prior = rng.random(), rng.random()

        value = posterior(likelihood, prior)

        assert value == likelihood * prior
        assert 0.0 <= value <= min(likelihood, prior)


def test_posterior_is_monotone_in_each_argument():
    rng = random.Random(43)
    for _ in range(SAMPLES):
        low, high, other = sorted([rng.random(), rng.random()]) + [rng.random()]

        assert posterior(low, other) <= posterior(high, other)
        assert posterior(other, low) <= posterior(other, high)


@pytest.mark.parametrize("likelihood, prior", [(-0.1, 0.5), (0.5, 1.01), (float("nan"), 0.5)])
def test_posterior_rejects_invalid_probabilities(likelihood, prior):
    with pytest.raises(ScoringError):
        posterior(likelihood, prior)


def test_posterior_identities():
    assert posterior(0.0, 0.9) == 0.0
    assert posterior(1.0, 0.37) == 0.37


# ===== THRESHOLD FILTER =====

def test_threshold_is_strict_on_random_triples():
    rng = random.Random(2024)
    sources = ["Times of India", "The WIRE", "Arif Media", "Unknown"]
    for i in range(SAMPLES):
        threshold = rng.uniform(0.01, 0.99)
        cfg = PriorConfig(threshold=threshold)
        chunk = _chunk(source=rng.choice(sources), doc_id=f"d{i}")
        likelihood = rng.random()

        (item,) = score_chunks("question", [chunk], [likelihood], cfg)

        assert item.included == (item.posterior > threshold)


def test_posterior_equal_to_threshold_is_excluded():
    cfg = PriorConfig(source_reputation={"S": 1.0}, threshold=0.5)

    (item,) = score_chunks("q", [_chunk(source="S")], [0.5], cfg)

    assert item.posterior == 0.5
    assert item.included is False


def test_score_chunks_length_mismatch():
    with pytest.raises(ScoringError, match="likelihoods"):
        score_chunks("q", [_chunk()], [0.5, 0.6], PriorConfig())


def test_score_chunks_preserves_input_order():
    chunks = [_chunk(doc_id=name) for name in ("z", "a", "m")]

    scored = score_chunks("q", chunks, [0.1, 0.9, 0.5], PriorConfig())

    assert [item.chunk_id for item in scored] == ["z:1:0", "a:1:0", "m:1:0"]


# ===== LIKELIHOOD =====

def test_lexical_likelihood_share_of_question_tokens():
    assert lexical_likelihood("gold medal final", "She won the gold medal") == pytest.approx(2 / 3)
    assert lexical_likelihood("gold medal", "nothing relevant here") == 0.0


def test_lexical_likelihood_honours_stopwords():
    assert lexical_likelihood("the gold medal", "gold medal") == pytest.approx(2 / 3)
    assert lexical_likelihood("the gold medal", "gold medal", stopwords=["the"]) == 1.0


def test_lexical_likelihood_without_question_tokens_is_uninformative():
    assert lexical_likelihood("?", "any text") == 0.5


# ===== CONFIG VALIDATION =====

def test_prior_config_requires_catch_all_tier():
    with pytest.raises(ValueError, match="catch-all"):
        PriorConfig(page_tiers=[PageTier(max_page=10, prior=0.7)])


def test_prior_config_requires_enabled_prior():
    with pytest.raises(ValueError):
        PriorConfig(enabled_priors=set())


@pytest.mark.parametrize("threshold", [0.0, 1.0])
def test_prior_config_threshold_open_interval(threshold):
    with pytest.raises(ValueError):
        PriorConfig(threshold=threshold)
