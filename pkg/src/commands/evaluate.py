"""`eval`: run the judge harness on seeded synthetic cases and write the report."""

import argparse
import logging
import sys
from pathlib import Path

import aiofiles

from src.commands.common import config_from_args, provider_for
from src.core.exceptions import DataError
from src.models.enums import RunMode
from src.services.judge import format_report_table, generate_cases, run_eval

logger = logging.getLogger(__name__)


def _positive(value: str) -> int:
    count = int(value)
    if count < 1:
        raise argparse.ArgumentTypeError(f"must be ≥ 1, got {value}")
    return count


def register(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="compare baseline and filtered pipelines")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--count", type=_positive, default=100)
    parser.add_argument("--report", help="report path (default: eval.report_path from config)")
    parser.add_argument(
        "--no-filter", dest="no_filter", action="store_true",
        help="run the filtered side without filtering (self-comparison)",
    )
    parser.set_defaults(handler=run)


async def run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    filter_enabled = cfg.eval.filter_enabled and not args.no_filter
    provider = provider_for(cfg) if cfg.mode == RunMode.LLM else None

    cases = generate_cases(args.seed, args.count, cfg.generator, cfg.dimension)
    report = await run_eval(
        cases,
        cfg.prior,
        cfg.mode,
        provider,
        model=cfg.provider.model,
        top_n=cfg.top_n,
        dimension=cfg.dimension,
        filter_enabled=filter_enabled,
        max_in_flight=cfg.provider.max_in_flight,
        max_tokens=cfg.provider.max_tokens,
        stopwords=cfg.retrieval.stopwords,
    )

    report_path = Path(args.report or cfg.eval.report_path)
    try:
        report_path.parent.mkdir(parents=True, exist_ok=True)
        async with aiofiles.open(report_path, "w", encoding="utf-8") as f:
            await f.write(report.model_dump_json(indent=2) + "\n")
    except OSError as e:
        raise DataError(f"cannot write report {report_path}: {e}") from e

    logger.info(f"Wrote evaluation report to {report_path}")
    sys.stdout.write(format_report_table(report))
    sys.stdout.write(f"report: {report_path}\n")
    return 0
