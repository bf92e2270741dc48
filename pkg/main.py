"""Command-line entry point for the Bayesian evidence RAG pipeline."""

import asyncio
import logging
import sys
from typing import Optional, Sequence

from src.commands.router import parse_args
from src.core.config import settings
from src.middleware.error_handler import handle_exception
from src.utils.logging import setup_logging

logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, dispatch and map any failure to its exit code."""
    try:
        args = parse_args(argv)
        setup_logging(args.log_level)
        logger.debug(f"{settings.PROJECT_NAME} {settings.VERSION}: running {args.command}")
        return asyncio.run(args.handler(args))
    except KeyboardInterrupt:
        sys.stderr.write("interrupted\n")
        return 130
    except Exception as e:
        return handle_exception(e)


if __name__ == "__main__":
    sys.exit(main())
