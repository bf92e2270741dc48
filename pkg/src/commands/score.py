"""`score`: score an explicit chunk file, bypassing retrieval."""

import argparse
import sys

from src.commands.common import (
    add_threshold_option, config_from_args, estimate_likelihoods, format_scored_table, split_records
)
from src.services.bayes import score_chunks
from src.services.corpus import load_chunk_file


def register(subparsers) -> None:
    parser = subparsers.add_parser("score", help="score the chunks of a chunk file")
    parser.add_argument("-q", "--question", required=True)
    parser.add_argument("--chunks", required=True, help="chunk JSONL with optional likelihood field")
    add_threshold_option(parser)
    parser.set_defaults(handler=run)


async def run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    records = load_chunk_file(args.chunks, cfg.prior.format_patterns)
    chunks, preset = split_records(records)

    likelihoods = await estimate_likelihoods(args.question, chunks, cfg, preset)
    scored = score_chunks(args.question, chunks, likelihoods, cfg.prior)

    sys.stdout.write(format_scored_table(scored, cfg.prior.threshold))
    return 0
