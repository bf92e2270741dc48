"""Answer-quality evaluation: synthetic conflicting evidence, answerers, judges, report."""

import asyncio
import logging
import random
import re
from typing import Dict, List, Optional, Sequence

from src.core.config import GeneratorConfig
from src.core.exceptions import PromptError, ProviderError
from src.models.enums import RunMode, TemplateId
from src.schemas.corpus import Chunk
from src.schemas.evaluation import CaseRecord, EvalCase, EvalReport
from src.schemas.llm import CompletionRequest
from src.schemas.prompt import PromptBundle
from src.schemas.scoring import PriorConfig
from src.services.bayes import lexical_likelihood, score_chunks
from src.services.llm_client import BaseProvider, ConcurrencyLimitedProvider, LikelihoodGrader
from src.services.promptkit import render_baseline, render_judge_prompt, render_scored
from src.services.retrieval import DEFAULT_DIMENSION, DEFAULT_TOP_N, Index, build_index, search

logger = logging.getLogger(__name__)

DEFAULT_MODEL = "gpt-3.5-turbo"
MAX_PADDING_ROUNDS = 24

_VERDICT_PATTERN = re.compile(r"\b(YES|NO)\b", re.IGNORECASE)


# ===== SYNTHETIC CASE MATERIAL =====

_FIRST_NAMES = (
    "Asha", "Ravi", "Mira", "Kiran", "Leena", "Tomas", "Ines", "Yuki", "Omar", "Sana",
    "Priya", "Jonas", "Amara", "Dmitri", "Lucia", "Hana",
)
_LAST_NAMES = (
    "Phadke", "Rautela", "Okafor", "Lindqvist", "Moreau", "Tanaka", "Haddad", "Kowalski",
    "Mendes", "Varga", "Achebe", "Brennan", "Castillo", "Dubois",
)
_EVENTS = (
    "women's 50kg freestyle", "men's 57kg freestyle", "women's 10m air pistol",
    "men's 400m hurdles", "women's singles badminton", "men's marathon",
    "women's 62kg weightlifting", "men's light heavyweight boxing",
)
_VENUES = ("Paris", "Lisbon", "Nairobi", "Osaka", "Toronto", "Melbourne")

# (gold outcome, conflicting outcomes); no conflicting outcome contains its gold outcome.
_OUTCOMES = (
    ("was disqualified", ("won the gold medal", "won the final bout", "took the title")),
    ("withdrew with an injury", ("won the semi-final", "reached the final", "won on points")),
    ("finished fourth", ("won the bronze medal", "took the silver medal", "topped the podium")),
    ("was stripped of the title", ("kept the title", "defended the title", "retained the belt")),
    ("lost in the first round", ("won the opening round", "advanced to the quarter-final", "cruised through")),
)

_DETAIL_SENTENCES = (
    "Officials reviewed the weigh-in records before the session.",
    "The crowd filled the arena long before the opening bell.",
    "Coaches declined to comment after the evening programme.",
    "Broadcasters replayed the decisive moments several times.",
    "The schedule ran late because of a rain delay outside.",
    "Team doctors were seen near the warm-up area.",
    "Federation delegates met the referees afterwards.",
    "Spectators from several countries waved flags throughout.",
    "Press photographers lined the far side of the venue.",
    "Volunteers handed out programmes at every entrance.",
    "A statement from the organising committee followed later.",
    "Training partners watched quietly from the stands.",
)

_DISTRACTOR_SENTENCES = (
    "{name} trained in the mountains ahead of the new season.",
    "{name} signed a sponsorship deal with a sportswear brand.",
    "{name} opened a youth academy near the capital.",
    "{name} spoke about nutrition plans in a podcast interview.",
)


def _headline(name: str, event: str, venue: str) -> str:
    return f"Here is what happened to {name} in the {event} at the {venue} Games."


def _compose_text(name: str, event: str, venue: str, outcome: str, details: Sequence[str]) -> str:
    return " ".join([_headline(name, event, venue), f"{name} {outcome}.", *details])


def _top_chunk_id(chunks: Sequence[Chunk], question: str, dimension: int) -> str:
    return search(build_index(chunks, dimension), question, 1)[0].chunk_id


def _generate_case(
    rng: random.Random,
    case_id: str,
    hard: bool,
    cfg: GeneratorConfig,
    dimension: int,
) -> EvalCase:
    name = f"{rng.choice(_FIRST_NAMES)} {rng.choice(_LAST_NAMES)}"
    event = rng.choice(_EVENTS)
    venue = rng.choice(_VENUES)
    gold_fact, conflicting_outcomes = rng.choice(_OUTCOMES)
    conflicts = rng.sample(conflicting_outcomes, cfg.conflicts_per_case)
    question = f"What happened to {name} in the {event} at the {venue} Games?"

    details = list(_DETAIL_SENTENCES)
    rng.shuffle(details)

    # Doc ids are shuffled so the tie-break cannot favour the gold chunk.
    slots = 1 + len(conflicts) + cfg.distractors_per_case
    doc_numbers = list(range(slots))
    rng.shuffle(doc_numbers)
    doc_ids = [f"{case_id}-doc{number}" for number in doc_numbers]

    gold_page = rng.randint(1, 10)
    gold_source = rng.choice(cfg.reputed_sources)
    conflict_meta = [
        (rng.randint(11, 40), rng.choice(cfg.low_reputation_sources)) for _ in conflicts
    ]
    distractors = [
        Chunk.build(
            doc_id=doc_ids[1 + len(conflicts) + k],
            source=rng.choice(cfg.low_reputation_sources),
            page=rng.randint(1, 40),
            index=0,
            text=rng.choice(_DISTRACTOR_SENTENCES).format(
                name=f"{rng.choice(_FIRST_NAMES)} {rng.choice(_LAST_NAMES)}"
            ),
        )
        for k in range(cfg.distractors_per_case)
    ]

    # Padding dilutes similarity: hard cases pad gold, easy cases pad the conflicts.
    gold_padding = 2 if hard else 0
    conflict_padding = 0 if hard else 2

    def build() -> List[Chunk]:
        gold = Chunk.build(
            doc_id=doc_ids[0], source=gold_source, page=gold_page, index=0,
            text=_compose_text(name, event, venue, gold_fact, details[:gold_padding]),
        )
        conflicting = [
            Chunk.build(
                doc_id=doc_ids[1 + j], source=source, page=page, index=0,
                text=_compose_text(
                    name, event, venue, outcome,
                    details[len(details) - conflict_padding:] if conflict_padding else [],
                ),
            )
            for j, (outcome, (page, source)) in enumerate(zip(conflicts, conflict_meta))
        ]
        return [gold, *conflicting, *distractors]

    chunks = build()
    for _ in range(MAX_PADDING_ROUNDS):
        gold_on_top = _top_chunk_id(chunks, question, dimension) == chunks[0].chunk_id
        if gold_on_top != hard:
            break
        if hard:
            gold_padding = min(gold_padding + 1, len(details))
        else:
            conflict_padding = min(conflict_padding + 1, len(details))
        chunks = build()

    actual_hard = _top_chunk_id(chunks, question, dimension) != chunks[0].chunk_id
    if actual_hard != hard:
        logger.warning(f"Case {case_id}: could not make the case {'hard' if hard else 'easy'}")

    ordered = sorted(chunks, key=lambda chunk: chunk.chunk_id)
    return EvalCase(
        case_id=case_id,
        question=question,
        gold_fact=gold_fact,
        chunks=ordered,
        hard=actual_hard,
    )


def generate_cases(
    seed: int,
    count: int,
    cfg: Optional[GeneratorConfig] = None,
    dimension: int = DEFAULT_DIMENSION,
) -> List[EvalCase]:
    """
    Seeded synthetic cases reproducing the conflicting-chunks failure mode.

    The gold chunk comes from a reputed source on an early page; each
    conflicting chunk comes from a low-reputation source and carries every
    question token, so lexical likelihood cannot separate them. A share of
    cases (hard_case_ratio) is built so a conflicting chunk outranks gold
    by similarity.
    """
    if count < 1:
        raise ValueError(f"count must be ≥ 1, got {count}")
    cfg = cfg or GeneratorConfig()
    rng = random.Random(seed)

    hard_count = round(cfg.hard_case_ratio * count)
    hard_positions = set(rng.sample(range(count), hard_count))

    return [
        _generate_case(rng, f"case-{position:04d}", position in hard_positions, cfg, dimension)
        for position in range(count)
    ]


PHOGAT_LIKELIHOODS: Dict[str, float] = {"toi:1:0": 0.8, "arif:1:0": 0.5, "wire:1:0": 0.7}


def phogat_case() -> EvalCase:
    """The three-chunk wrestling scenario with its LLM-graded likelihoods."""
    return EvalCase(
        case_id="phogat",
        question="What happened to India in women's freestyle Olympics?",
        gold_fact="disqualified",
        chunks=[
            Chunk.build(
                doc_id="toi", source="Times of India", page=1, index=0,
                text=(
                    "Vinesh Phogat was disqualified for being overweight before her final bout "
                    "in the women's 50kg category at the Paris Olympics 2024."
                ),
            ),
            Chunk.build(
                doc_id="arif", source="Arif Media", page=1, index=0,
                text="Vinesh Phogat wins Paris Olympics finals after defeating Ukraine's Oksana Livach.",
            ),
            Chunk.build(
                doc_id="wire", source="The WIRE", page=1, index=0,
                text="Vinesh Phogat wins women's 50kg freestyle semi-final defeating Ukraine's Oksana Livach.",
            ),
        ],
        likelihoods=PHOGAT_LIKELIHOODS,
    )


# ===== ANSWERING AND JUDGING =====

def mock_answer(prompt_bundle: PromptBundle, index: Index) -> str:
    """Parrot the embedded chunk most similar to the question (ties by chunk_id)."""
    embedded = set(prompt_bundle.embedded_chunk_ids)
    if not embedded:
        raise PromptError("bundle embeds no chunks")

    for hit in search(index, prompt_bundle.question, index.size or 1):
        if hit.chunk_id in embedded:
            return index.get(hit.chunk_id).text
    raise PromptError("none of the embedded chunks is in the index")


def parse_verdict(text: str) -> Optional[bool]:
    """First whole-word YES/NO, case-insensitive."""
    match = _VERDICT_PATTERN.search(text)
    if match is None:
        return None
    return match.group(1).upper() == "YES"


async def judge_answer(
    answer: str,
    gold_fact: str,
    mode: RunMode,
    provider: Optional[BaseProvider] = None,
    model: str = DEFAULT_MODEL,
) -> bool:
    """MOCK: case-insensitive containment. LLM: YES/NO verdict, unparseable counts as NO."""
    if mode == RunMode.MOCK:
        return gold_fact.lower() in answer.lower()

    if provider is None:
        raise ProviderError("LLM judging needs a configured provider")

    system, user = render_judge_prompt(answer, gold_fact)
    response = await provider.complete(
        CompletionRequest(model=model, system=system, user=user, temperature=0.0, max_tokens=8)
    )
    verdict = parse_verdict(response.text)
    if verdict is None:
        logger.warning(f"Unparseable judge verdict {response.text!r}; counting as incorrect")
        return False
    return verdict


# ===== EVALUATION =====

class _CaseRunner:
    """Runs one case through both pipelines."""

    def __init__(
        self,
        cfg: PriorConfig,
        mode: RunMode,
        provider: Optional[BaseProvider],
        *,
        model: str,
        top_n: int,
        dimension: int,
        filter_enabled: bool,
        max_in_flight: int,
        max_tokens: int,
        stopwords: Sequence[str],
    ):
        self.cfg = cfg
        self.mode = mode
        self.provider = provider
        self.model = model
        self.top_n = top_n
        self.dimension = dimension
        self.filter_enabled = filter_enabled
        self.max_tokens = max_tokens
        self.stopwords = tuple(stopwords)
        self.grader = (
            LikelihoodGrader(provider, model, max_in_flight=max_in_flight)
            if provider is not None else None
        )

    async def _answer(self, bundle: PromptBundle, index: Index) -> str:
        if self.mode == RunMode.MOCK:
            return mock_answer(bundle, index)
        response = await self.provider.complete(
            CompletionRequest(
                model=self.model, user=bundle.rendered, temperature=0.0, max_tokens=self.max_tokens
            )
        )
        return response.text

    async def _likelihoods(self, case: EvalCase, chunks: Sequence[Chunk]) -> List[float]:
        if case.likelihoods is not None:
            return [case.likelihoods[chunk.chunk_id] for chunk in chunks]
        if self.mode == RunMode.MOCK:
            return [lexical_likelihood(case.question, chunk.text, self.stopwords) for chunk in chunks]
        return await self.grader.grade_many(case.question, chunks)

    async def run(self, case: EvalCase) -> CaseRecord:
        index = build_index(case.chunks, self.dimension, self.stopwords)
        retrieved = [index.get(hit.chunk_id) for hit in search(index, case.question, self.top_n)]

        baseline = render_baseline(case.question, retrieved)
        baseline_answer = await self._answer(baseline, index)
        baseline_correct = await judge_answer(
            baseline_answer, case.gold_fact, self.mode, self.provider, self.model
        )

        if not self.filter_enabled:
            return CaseRecord(
                case_id=case.case_id,
                question=case.question,
                gold_fact=case.gold_fact,
                hard=case.hard,
                retrieved_chunk_ids=[chunk.chunk_id for chunk in retrieved],
                posteriors={},
                baseline_template_id=baseline.template_id,
                filtered_template_id=baseline.template_id,
                baseline_answer=baseline_answer,
                filtered_answer=baseline_answer,
                baseline_correct=baseline_correct,
                filtered_correct=baseline_correct,
            )

        likelihoods = await self._likelihoods(case, retrieved)
        scored = score_chunks(case.question, retrieved, likelihoods, self.cfg)
        posteriors = {item.chunk_id: item.posterior for item in scored}

        filtered_template_id: Optional[TemplateId] = None
        filtered_answer: Optional[str] = None
        filtered_correct = False
        filtered_empty = False
        try:
            filtered = render_scored(case.question, scored)
        except PromptError:
            filtered_empty = True
            logger.warning(f"Case {case.case_id}: no evidence passed the filter; scored incorrect")
        else:
            filtered_template_id = filtered.template_id
            filtered_answer = await self._answer(filtered, index)
            filtered_correct = await judge_answer(
                filtered_answer, case.gold_fact, self.mode, self.provider, self.model
            )

        return CaseRecord(
            case_id=case.case_id,
            question=case.question,
            gold_fact=case.gold_fact,
            hard=case.hard,
            retrieved_chunk_ids=[chunk.chunk_id for chunk in retrieved],
            posteriors=posteriors,
            baseline_template_id=baseline.template_id,
            filtered_template_id=filtered_template_id,
            baseline_answer=baseline_answer,
            filtered_answer=filtered_answer,
            baseline_correct=baseline_correct,
            filtered_correct=filtered_correct,
            filtered_empty=filtered_empty,
        )


async def run_eval(
    cases: Sequence[EvalCase],
    cfg: PriorConfig,
    mode: RunMode = RunMode.MOCK,
    provider: Optional[BaseProvider] = None,
    *,
    model: str = DEFAULT_MODEL,
    top_n: int = DEFAULT_TOP_N,
    dimension: int = DEFAULT_DIMENSION,
    filter_enabled: bool = True,
    max_in_flight: int = 4,
    max_tokens: int = 256,
    stopwords: Sequence[str] = (),
) -> EvalReport:
    """Run baseline and filtered pipelines on every case and aggregate the verdicts."""
    if not cases:
        raise ValueError("at least one case is required")
    if mode == RunMode.LLM and provider is None:
        raise ProviderError("LLM mode needs a configured provider")

    if provider is not None:
        # every grading, answering and judging call across cases shares one cap
        provider = ConcurrencyLimitedProvider(provider, max_in_flight)
    runner = _CaseRunner(
        cfg,
        mode,
        provider,
        model=model,
        top_n=top_n,
        dimension=dimension,
        filter_enabled=filter_enabled,
        max_in_flight=max_in_flight,
        max_tokens=max_tokens,
        stopwords=stopwords,
    )
    semaphore = asyncio.Semaphore(max_in_flight)

    async def _run(case: EvalCase) -> CaseRecord:
        async with semaphore:
            return await runner.run(case)

    records = await asyncio.gather(*(_run(case) for case in cases))
    report = EvalReport.aggregate(list(records), mode=mode, filter_enabled=filter_enabled)

    logger.info(
        f"Evaluated {report.cases} cases: baseline {report.baseline_accuracy:.2%}, "
        f"filtered {report.filtered_accuracy:.2%}"
    )
    return report


def format_report_table(report: EvalReport) -> str:
    """Human-readable summary of an evaluation report."""
    relative = (
        f"{report.relative_improvement_pct:+.1f}%"
        if report.relative_improvement_pct is not None else "undefined (baseline accuracy 0)"
    )
    rows = [
        ("pipeline", "correct", "accuracy"),
        ("baseline", f"{report.baseline_correct}/{report.cases}", f"{report.baseline_accuracy:.2%}"),
        ("filtered", f"{report.filtered_correct}/{report.cases}", f"{report.filtered_accuracy:.2%}"),
    ]
    lines = [f"{a:<10} {b:>9} {c:>9}" for a, b, c in rows]
    lines.insert(1, "-" * 30)
    lines += [
        "",
        f"mode: {report.mode.value}   protocol: {report.protocol}   hard cases: {report.hard_cases}",
        f"relative improvement: {relative}",
        f"absolute improvement: {report.absolute_improvement_pct:+.1f} points",
        f"filtered-empty cases: {len(report.filtered_empty_cases)}",
        f"note: {report.note}",
    ]
    return "\n".join(lines) + "\n"
