"""Command-line router: global flags plus one subcommand per pipeline stage."""

import argparse
from typing import Optional, Sequence

from src.commands import evaluate, ingest, query, render_prompt, score
from src.commands.common import threshold_value
from src.core.config import settings
from src.core.exceptions import UsageError
from src.models.enums import RunMode


class BragArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(message, usage=self.format_usage())


def build_parser() -> BragArgumentParser:
    parser = BragArgumentParser(
        prog="brag",
        description=f"{settings.PROJECT_NAME}: Bayesian filtering of retrieved evidence.",
    )
    parser.add_argument("--version", action="version", version=settings.VERSION)
    parser.add_argument("--config", help="TOML config file (default: $BRAG_CONFIG)")
    parser.add_argument(
        "--mode",
        type=str.upper,
        choices=RunMode.get_all_values(),
        help="MOCK (offline, deterministic) or LLM",
    )
    parser.add_argument("--threshold", type=threshold_value, help="posterior inclusion threshold")
    parser.add_argument("--log-level", help="override LOG_LEVEL")

    subparsers = parser.add_subparsers(
        dest="command",
        metavar="{ingest,query,score,eval,render-prompt}",
        parser_class=BragArgumentParser,
    )
    subparsers.required = True

    # ===== SUBCOMMANDS =====
    ingest.register(subparsers)
    query.register(subparsers)
    score.register(subparsers)
    evaluate.register(subparsers)
    render_prompt.register(subparsers)

    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
