"""`query`: retrieve, score and render the prompt for a question."""

import argparse
import logging
import sys

from src.commands.common import (
    add_threshold_option, config_from_args, estimate_likelihoods, format_scored_table, provider_for,
    require_corpus_path,
)
from src.core.config import PipelineConfig
from src.core.exceptions import PromptError
from src.models.enums import RunMode
from src.schemas.llm import CompletionRequest
from src.services.bayes import score_chunks
from src.services.corpus import chunk_corpus, load_corpus
from src.services.promptkit import render_baseline, render_scored
from src.services.retrieval import Index, RemoteEmbeddingClient, build_index, search, search_vector

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("query", help="retrieve, score and render a prompt")
    parser.add_argument("-q", "--question", required=True)
    parser.add_argument("--corpus", help="corpus JSONL (default: corpus_path from config)")
    parser.add_argument("--top-n", dest="top_n", type=int, help="chunks to retrieve")
    add_threshold_option(parser)
    parser.add_argument("--send", action="store_true", help="send the prompt and print the answer")
    parser.set_defaults(handler=run)


async def _retrieve(question: str, chunks, cfg: PipelineConfig):
    """Top-n chunks from the hashing index or, when configured, a remote embedder."""
    endpoint = cfg.retrieval.embedding_endpoint
    if not endpoint:
        index = build_index(chunks, cfg.dimension, cfg.retrieval.stopwords)
        return index, search(index, question, cfg.top_n)

    client = RemoteEmbeddingClient(
        endpoint, cfg.dimension, timeout=cfg.retrieval.embedding_timeout_seconds
    )
    vectors = await client.embed_texts([chunk.text for chunk in chunks] + [question])
    index = Index.from_vectors(chunks, vectors[:-1], cfg.retrieval.stopwords)
    return index, search_vector(index, vectors[-1], cfg.top_n)


async def run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    documents = load_corpus(require_corpus_path(cfg))
    chunks = chunk_corpus(documents, cfg.max_chars, cfg.prior.format_patterns)

    out = sys.stdout
    if not chunks:
        out.write("corpus has no chunks; nothing to retrieve\n")
        return 0

    index, hits = await _retrieve(args.question, chunks, cfg)
    retrieved = [index.get(hit.chunk_id) for hit in hits]

    provider = provider_for(cfg) if (args.send or cfg.mode == RunMode.LLM) else None
    likelihoods = await estimate_likelihoods(args.question, retrieved, cfg, provider=provider)
    scored = score_chunks(args.question, retrieved, likelihoods, cfg.prior)
    out.write(format_scored_table(scored, cfg.prior.threshold))
    out.write("\n")

    try:
        bundle = render_scored(args.question, scored)
    except PromptError:
        logger.warning("No retrieved chunk passed the filter; falling back to the baseline prompt")
        bundle = render_baseline(args.question, retrieved)
    out.write(bundle.rendered)

    if args.send:
        response = await provider.complete(
            CompletionRequest(
                model=cfg.provider.model,
                user=bundle.rendered,
                temperature=0.0,
                max_tokens=cfg.provider.max_tokens,
            )
        )
        out.write(f"\nAnswer: {response.text}\n")
    return 0
