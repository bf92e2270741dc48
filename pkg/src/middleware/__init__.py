"""Middleware package."""

from .error_handler import handle_exception

__all__ = ["handle_exception"]
