"""Render baseline, in-prompt Bayesian and scored RAG prompts."""

from typing import List, Sequence, Tuple

from src.core.exceptions import PromptError
from src.models.enums import TemplateId
from src.schemas.corpus import Chunk
from src.schemas.prompt import PromptBundle
from src.schemas.scoring import ScoredChunk
from src.templates.prompt_templates import PromptTemplates

DEFAULT_PRIOR_HINT = PromptTemplates.DEFAULT_PRIOR_HINT


def format_percent(threshold: float) -> str:
    """0.5 -> '50', 0.6 -> '60', 0.125 -> '12.5'."""
    return format(round(threshold * 100, 6), "g")


def _chunk_line(chunk: Chunk, include_page: bool = False) -> str:
    line = PromptTemplates.CHUNK_LINE.format(text=chunk.text.strip(), source=chunk.source)
    if include_page:
        line += PromptTemplates.PAGE_SUFFIX.format(page=chunk.page)
    return line


def _assemble(header: str, question: str, chunk_lines: Sequence[str]) -> str:
    """Header, question and chunk list separated by blank lines, LF endings."""
    parts = [
        header,
        "",
        PromptTemplates.QUESTION_LINE.format(question=question),
        "",
        PromptTemplates.CHUNKS_LINE,
        "",
        *chunk_lines,
    ]
    return "\n".join(parts) + "\n"


def render_baseline(question: str, chunks: Sequence[Chunk]) -> PromptBundle:
    """Plain top-n RAG prompt."""
    if not chunks:
        raise PromptError("at least one chunk is required to render a prompt")

    rendered = _assemble(
        PromptTemplates.ANSWER_HEADER,
        question,
        [_chunk_line(chunk) for chunk in chunks],
    )
    return PromptBundle(
        template_id=TemplateId.BASELINE,
        question=question,
        rendered=rendered,
        embedded_chunk_ids=tuple(chunk.chunk_id for chunk in chunks),
    )


def render_inprompt_bayes(
    question: str,
    chunks: Sequence[Chunk],
    threshold: float = 0.5,
    prior_hint: str = DEFAULT_PRIOR_HINT,
    explain: bool = False,
    include_pages: bool = False,
) -> PromptBundle:
    """Baseline prompt that asks the model itself to score and filter the chunks."""
    if not chunks:
        raise PromptError("at least one chunk is required to render a prompt")
    if not 0.0 < threshold < 1.0:
        raise PromptError(f"threshold must be in (0, 1), got {threshold}")

    sentences = [
        PromptTemplates.ANSWER_HEADER,
        PromptTemplates.BAYES_INSTRUCTION.format(percent=format_percent(threshold)),
        f"{prior_hint.rstrip('.')}.",
    ]
    if explain:
        sentences.append(PromptTemplates.EXPLAIN_INSTRUCTION)

    rendered = _assemble(
        " ".join(sentences),
        question,
        [_chunk_line(chunk, include_page=include_pages) for chunk in chunks],
    )
    return PromptBundle(
        template_id=TemplateId.INPROMPT_BAYES,
        question=question,
        rendered=rendered,
        embedded_chunk_ids=tuple(chunk.chunk_id for chunk in chunks),
    )


def order_for_prompt(scored: Sequence[ScoredChunk]) -> List[ScoredChunk]:
    """Included chunks by posterior descending, then chunk_id."""
    included = [item for item in scored if item.included]
    return sorted(included, key=lambda item: (-item.posterior, item.chunk.chunk_id))


def render_scored(question: str, scored: Sequence[ScoredChunk]) -> PromptBundle:
    """Prompt carrying only the chunks that passed the filter, with their posteriors."""
    ordered = order_for_prompt(scored)
    if not ordered:
        raise PromptError("no evidence passed the filter")

    lines = [
        _chunk_line(item.chunk)
        + PromptTemplates.POSTERIOR_SUFFIX.format(posterior=item.posterior)
        for item in ordered
    ]
    rendered = _assemble(
        f"{PromptTemplates.ANSWER_HEADER} {PromptTemplates.SCORED_HEADER}",
        question,
        lines,
    )
    return PromptBundle(
        template_id=TemplateId.SCORED,
        question=question,
        rendered=rendered,
        embedded_chunk_ids=tuple(item.chunk.chunk_id for item in ordered),
    )


def render_grading_prompt(question: str, chunk: Chunk) -> Tuple[str, str]:
    """(system, user) messages asking for a HIGH/MEDIUM/LOW likelihood label."""
    user = PromptTemplates.GRADING_USER.format(
        question=question,
        source=chunk.source,
        page=chunk.page,
        text=chunk.text.strip(),
    )
    return PromptTemplates.GRADING_SYSTEM, user


def render_judge_prompt(answer: str, gold_fact: str) -> Tuple[str, str]:
    """(system, user) messages asking whether an answer asserts the gold fact."""
    user = PromptTemplates.JUDGE_USER.format(gold_fact=gold_fact, answer=answer)
    return PromptTemplates.JUDGE_SYSTEM, user
