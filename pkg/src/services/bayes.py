"""Bayesian chunk scoring: priors, likelihood, posterior and threshold filter.

The marginal P(context) is the same for every chunk and taken as 1, so the
posterior is the plain product likelihood * prior. Posteriors are inclusion
scores, not a distribution over chunks.
"""

import logging
import math
from typing import Dict, List, Mapping, Sequence, Tuple

from src.core.exceptions import ScoringError
from src.models.enums import FormatFlag, PriorKind
from src.schemas.corpus import Chunk
from src.schemas.scoring import PageTier, PriorConfig, ScoredChunk
from src.services.retrieval import tokenize

logger = logging.getLogger(__name__)

NEUTRAL_PRIOR = 0.5
UNINFORMATIVE_LIKELIHOOD = 0.5

_FORMAT_BONUS_FLAGS = frozenset({FormatFlag.BULLETED, FormatFlag.ORG_FORMATTED})


def _check_probability(name: str, value: float) -> float:
    if not isinstance(value, (int, float)) or math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ScoringError(f"{name} must be in [0, 1], got {value!r}")
    return float(value)


# ===== PRIORS =====

def page_prior(page: int, tiers: Sequence[PageTier]) -> float:
    """Prior of the first tier whose max_page covers the page (bounds inclusive)."""
    for tier in tiers:
        if tier.max_page is None or page <= tier.max_page:
            return tier.prior
    # Validated tables end with a catch-all.
    return tiers[-1].prior


def source_prior(source: str, cfg: PriorConfig) -> float:
    """Reputation of the source, or the configured default."""
    return cfg.source_reputation.get(source, cfg.default_source_prior)


def format_prior(flags: frozenset, cfg: PriorConfig) -> float:
    """Bonus prior for already-summarised formatting, else neutral."""
    if flags & _FORMAT_BONUS_FLAGS:
        return cfg.format_bonus_prior
    return NEUTRAL_PRIOR


def compose_priors(values: Mapping[PriorKind, float], weights: Mapping[PriorKind, float]) -> float:
    """
    Weighted geometric mean of the enabled priors.

    exp(sum(w * ln v) / sum(w)); a single prior is returned unchanged and any
    exact zero gives zero. The result is clamped to [min, max] of the inputs.
    """
    if not values:
        raise ScoringError("at least one prior value is required")

    for kind, value in values.items():
        _check_probability(f"{kind.value} prior", value)
    if any(value == 0.0 for value in values.values()):
        return 0.0
    if len(values) == 1:
        return next(iter(values.values()))

    kinds = [kind for kind in PriorKind.ordered() if kind in values]
    total_weight = 0.0
    weighted_log = 0.0
    for kind in kinds:
        weight = weights.get(kind)
        if weight is None or weight <= 0:
            raise ScoringError(f"weight for {kind.value} must be > 0")
        total_weight += weight
        weighted_log += weight * math.log(values[kind])

    composed = math.exp(weighted_log / total_weight)
    return min(max(composed, min(values.values())), max(values.values()))


def chunk_prior(chunk: Chunk, cfg: PriorConfig) -> Tuple[float, Dict[PriorKind, float]]:
    """Evaluate the enabled priors for a chunk and compose them."""
    components: Dict[PriorKind, float] = {}
    if PriorKind.PAGE in cfg.enabled_priors:
        components[PriorKind.PAGE] = page_prior(chunk.page, cfg.page_tiers)
    if PriorKind.SOURCE in cfg.enabled_priors:
        components[PriorKind.SOURCE] = source_prior(chunk.source, cfg)
    if PriorKind.FORMAT in cfg.enabled_priors:
        components[PriorKind.FORMAT] = format_prior(chunk.format_flags, cfg)
    return compose_priors(components, cfg.weights), components


# ===== LIKELIHOOD AND POSTERIOR =====

def lexical_likelihood(question: str, chunk_text: str, stopwords: Sequence[str] = ()) -> float:
    """Share of distinct question tokens that also occur in the chunk."""
    question_tokens = set(tokenize(question, stopwords))
    if not question_tokens:
        return UNINFORMATIVE_LIKELIHOOD
    chunk_tokens = set(tokenize(chunk_text, stopwords))
    return len(question_tokens & chunk_tokens) / len(question_tokens)


def posterior(likelihood: float, prior: float) -> float:
    """Likelihood times prior; the marginal is fixed at 1."""
    return _check_probability("likelihood", likelihood) * _check_probability("prior", prior)


def score_chunks(
    question: str,
    chunks: Sequence[Chunk],
    likelihoods: Sequence[float],
    cfg: PriorConfig,
) -> List[ScoredChunk]:
    """Score chunks in input order; a chunk is included iff posterior > threshold."""
    if len(chunks) != len(likelihoods):
        raise ScoringError(
            f"got {len(likelihoods)} likelihoods for {len(chunks)} chunks"
        )

    scored = []
    for chunk, likelihood in zip(chunks, likelihoods):
        prior, components = chunk_prior(chunk, cfg)
        value = posterior(likelihood, prior)
        scored.append(ScoredChunk(
            chunk=chunk,
            likelihood=likelihood,
            prior=prior,
            posterior=value,
            included=value > cfg.threshold,
            prior_components=components,
        ))

    logger.debug(
        f"Scored {len(scored)} chunks for {question!r}: "
        f"{sum(1 for item in scored if item.included)} above {cfg.threshold}"
    )
    return scored


def filter_chunks(scored: Sequence[ScoredChunk]) -> Tuple[List[ScoredChunk], List[ScoredChunk]]:
    """Stable partition into (included, excluded)."""
    included = [item for item in scored if item.included]
    excluded = [item for item in scored if not item.included]
    return included, excluded
