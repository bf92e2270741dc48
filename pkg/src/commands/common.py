"""Helpers shared by the subcommands."""

import argparse
import logging
from typing import Any, Dict, List, Optional, Sequence

from src.core.config import PipelineConfig, load_pipeline_config
from src.core.exceptions import UsageError
from src.models.enums import RunMode
from src.schemas.corpus import Chunk, ChunkRecord
from src.schemas.scoring import ScoredChunk
from src.services.bayes import lexical_likelihood
from src.services.llm_client import BaseProvider, LikelihoodGrader, get_provider

logger = logging.getLogger(__name__)


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """Load the pipeline config and apply the global command-line overrides."""
    overrides: Dict[str, Any] = {}
    if args.mode:
        overrides["mode"] = args.mode
    if args.threshold is not None:
        overrides["prior"] = {"threshold": args.threshold}
    if getattr(args, "corpus", None):
        overrides["corpus_path"] = args.corpus
    if getattr(args, "top_n", None) is not None:
        overrides["top_n"] = args.top_n
    return load_pipeline_config(args.config, overrides)


def threshold_value(value: str) -> float:
    try:
        threshold = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}")
    if not 0.0 < threshold < 1.0:
        raise argparse.ArgumentTypeError(f"threshold must be in (0, 1), got {value}")
    return threshold


def add_threshold_option(parser: argparse.ArgumentParser) -> None:
    """Subcommand-level --threshold; left unset unless given so the global flag still applies."""
    parser.add_argument(
        "--threshold",
        type=threshold_value,
        default=argparse.SUPPRESS,
        help="posterior inclusion threshold",
    )


def require_corpus_path(cfg: PipelineConfig) -> str:
    if not cfg.corpus_path:
        raise UsageError("no corpus given: pass --corpus or set corpus_path in the config file")
    return cfg.corpus_path


def provider_for(cfg: PipelineConfig) -> BaseProvider:
    return get_provider(cfg.provider, cfg.mode)


async def estimate_likelihoods(
    question: str,
    chunks: Sequence[Chunk],
    cfg: PipelineConfig,
    preset: Optional[Sequence[Optional[float]]] = None,
    provider: Optional[BaseProvider] = None,
) -> List[float]:
    """
    Likelihood per chunk: a preset value when given, else lexical overlap in
    MOCK mode or an LLM grade in LLM mode.
    """
    preset = list(preset) if preset is not None else [None] * len(chunks)
    missing = [i for i, value in enumerate(preset) if value is None]
    if not missing:
        return [float(value) for value in preset]

    if cfg.mode == RunMode.MOCK:
        stopwords = cfg.retrieval.stopwords
        estimated = [lexical_likelihood(question, chunks[i].text, stopwords) for i in missing]
    else:
        grader = LikelihoodGrader(
            provider or provider_for(cfg),
            cfg.provider.model,
            max_in_flight=cfg.provider.max_in_flight,
        )
        estimated = await grader.grade_many(question, [chunks[i] for i in missing])

    for i, value in zip(missing, estimated):
        preset[i] = value
    return [float(value) for value in preset]


def split_records(records: Sequence[ChunkRecord]):
    """(chunks, likelihoods-or-None) from chunk file records."""
    return [record.chunk for record in records], [record.likelihood for record in records]


def format_scored_table(scored: Sequence[ScoredChunk], threshold: float) -> str:
    header = f"{'chunk_id':<28} {'source':<18} {'page':>4} {'likelihood':>10} {'prior':>6} {'posterior':>9}  included"
    lines = [header, "-" * len(header)]
    for item in scored:
        chunk = item.chunk
        lines.append(
            f"{chunk.chunk_id:<28} {chunk.source[:18]:<18} {chunk.page:>4} "
            f"{item.likelihood:>10.4f} {item.prior:>6.4f} {item.posterior:>9.4f}  "
            f"{'yes' if item.included else 'no'}"
        )
    included = sum(1 for item in scored if item.included)
    lines.append("")
    lines.append(f"{included} of {len(scored)} chunks above threshold {threshold:g}")
    return "\n".join(lines) + "\n"
