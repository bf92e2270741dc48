"""Map exceptions to exit codes and user-facing messages at the command boundary."""

import logging
import sys
import traceback
from typing import Callable, Dict, TextIO, Type

from pydantic import ValidationError

from src.core.exceptions import BragError, DataError, ProviderError, UsageError

logger = logging.getLogger(__name__)

ExitHandler = Callable[[BaseException, TextIO], int]


def usage_error_handler(exc: UsageError, stream: TextIO) -> int:
    """Print usage text and the reason."""
    if exc.usage:
        stream.write(exc.usage if exc.usage.endswith("\n") else exc.usage + "\n")
    stream.write(f"error: {exc.detail}\n")
    return exc.exit_code


def data_error_handler(exc: DataError, stream: TextIO) -> int:
    """Handle invalid input data or configuration."""
    logger.debug(f"{type(exc).__name__}: {exc.detail}")
    stream.write(f"error: {exc.detail}\n")
    return exc.exit_code


def provider_error_handler(exc: ProviderError, stream: TextIO) -> int:
    """Handle provider failures; details never include the credential."""
    logger.error(f"Provider failure ({type(exc).__name__}): {exc.detail}")
    stream.write(f"provider error: {exc.detail}\n")
    return exc.exit_code


def validation_exception_handler(exc: ValidationError, stream: TextIO) -> int:
    """Handle schema validation errors outside the loaders."""
    details = []
    for error in exc.errors():
        error_location = " -> ".join(str(loc) for loc in error["loc"])
        details.append(f"{error_location}: {error['msg']}")
    stream.write("error: invalid data\n")
    for detail in details:
        stream.write(f"  {detail}\n")
    return DataError.exit_code


def general_exception_handler(exc: BaseException, stream: TextIO) -> int:
    """Handle all other exceptions."""
    error_traceback = "".join(traceback.format_exception(type(exc), exc, exc.__traceback__))
    logger.error(f"Unhandled exception: {exc}\n{error_traceback}")
    stream.write(f"error: {exc}\n")
    return DataError.exit_code


_HANDLERS: Dict[Type[BaseException], ExitHandler] = {
    UsageError: usage_error_handler,
    DataError: data_error_handler,
    ProviderError: provider_error_handler,
    ValidationError: validation_exception_handler,
}


def handle_exception(exc: BaseException, stream: TextIO | None = None) -> int:
    """Dispatch to the most specific registered handler and return the exit code."""
    stream = stream or sys.stderr
    for exc_type in type(exc).__mro__:
        handler = _HANDLERS.get(exc_type)
        if handler is not None:
            return handler(exc, stream)
    if isinstance(exc, BragError):
        stream.write(f"error: {exc.detail}\n")
        return exc.exit_code
    return general_exception_handler(exc, stream)
