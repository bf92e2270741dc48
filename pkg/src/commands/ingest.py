"""`ingest`: validate a corpus and print chunk statistics."""

import argparse
import logging
import sys

from src.commands.common import config_from_args, require_corpus_path
from src.services.corpus import chunk_corpus, corpus_statistics, load_corpus

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("ingest", help="validate a corpus and print chunk statistics")
    parser.add_argument("--corpus", help="corpus JSONL (default: corpus_path from config)")
    parser.set_defaults(handler=run)


async def run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    documents = load_corpus(require_corpus_path(cfg))
    chunks = chunk_corpus(documents, cfg.max_chars, cfg.prior.format_patterns)
    stats = corpus_statistics(documents, chunks)

    out = sys.stdout
    out.write(f"documents: {stats.documents}\n")
    out.write(f"pages: {stats.pages}\n")
    out.write(f"chunks: {stats.chunks}\n")
    out.write(f"bulleted chunks: {stats.bulleted_chunks}\n")
    out.write(
        f"chunk chars: min {stats.min_chunk_chars} / mean {stats.mean_chunk_chars} / max {stats.max_chunk_chars}\n"
    )
    out.write("chunks per source:\n")
    for source, count in stats.chunks_per_source.items():
        out.write(f"  {source}: {count}\n")
    return 0
