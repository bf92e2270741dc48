"""`render-prompt`: emit a prompt exactly as the pipeline renders it."""

import argparse
import sys

from src.commands.common import (
    add_threshold_option, config_from_args, estimate_likelihoods, split_records
)
from src.models.enums import TemplateId
from src.services.bayes import score_chunks
from src.services.corpus import load_chunk_file
from src.services.promptkit import DEFAULT_PRIOR_HINT, render_baseline, render_inprompt_bayes, render_scored


def register(subparsers) -> None:
    parser = subparsers.add_parser("render-prompt", help="print a rendered prompt")
    parser.add_argument(
        "--template", required=True, type=str.upper, choices=TemplateId.get_all_values()
    )
    parser.add_argument("-q", "--question", required=True)
    parser.add_argument("--chunks", required=True, help="chunk JSONL")
    add_threshold_option(parser)
    parser.add_argument("--hint", default=DEFAULT_PRIOR_HINT, help="prior hint sentence (in-prompt Bayes)")
    parser.add_argument("--explain", action="store_true", help="ask for the Bayesian analysis")
    parser.add_argument("--pages", action="store_true", help="append page numbers to chunk lines")
    parser.set_defaults(handler=run)


async def run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    chunks, preset = split_records(load_chunk_file(args.chunks, cfg.prior.format_patterns))
    template = TemplateId(args.template)

    if template == TemplateId.BASELINE:
        bundle = render_baseline(args.question, chunks)
    elif template == TemplateId.INPROMPT_BAYES:
        bundle = render_inprompt_bayes(
            args.question,
            chunks,
            threshold=cfg.prior.threshold,
            prior_hint=args.hint,
            explain=args.explain,
            include_pages=args.pages,
        )
    else:
        likelihoods = await estimate_likelihoods(args.question, chunks, cfg, preset)
        bundle = render_scored(args.question, score_chunks(args.question, chunks, likelihoods, cfg.prior))

    sys.stdout.write(bundle.rendered)
    return 0
