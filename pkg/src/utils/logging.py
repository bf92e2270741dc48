"""Logging configuration utilities."""

import logging
import logging.handlers
import json
import os
import sys
from datetime import datetime, timezone

from src.core.config import settings


class JSONFormatter(logging.Formatter):
    """JSON formatter for structured logging."""

    def __init__(self, service_name):
        super().__init__()
        self.service_name = service_name

    def format(self, record):
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "service": self.service_name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            log_entry['exc_info'] = self.formatException(record.exc_info)
        if record.stack_info:
            log_entry['stack_info'] = self.formatStack(record.stack_info)

        return json.dumps(log_entry)


def build_logging_config(level: str, log_file_path: str | None) -> dict:
    """Build the dictConfig; console goes to stderr so stdout carries only command output."""
    handlers = ['console']
    config = {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'json': {
                '()': 'src.utils.logging.JSONFormatter',
                'service_name': settings.SERVICE_NAME,
            },
            'simple': {
                'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            },
        },
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'level': level,
                'formatter': 'simple',
                'stream': 'ext://sys.stderr',
            },
        },
        'loggers': {
            '': {  # Root logger
                'level': level,
                'handlers': handlers,
                'propagate': False,
            },
            'httpx': {
                'level': 'WARNING',
                'handlers': handlers,
                'propagate': False,
            },
        },
    }

    if log_file_path:
        config['handlers']['file'] = {
            'class': 'logging.handlers.RotatingFileHandler',
            'level': level,
            'formatter': 'json',
            'filename': log_file_path,
            'maxBytes': settings.LOG_MAX_BYTES,
            'backupCount': settings.LOG_BACKUP_COUNT,
            'encoding': 'utf-8',
        }
        handlers.append('file')

    return config


def setup_logging(level: str | None = None):
    """Setup application logging."""
    import logging.config

    level = (level or ("DEBUG" if settings.DEBUG else settings.LOG_LEVEL)).upper()
    log_file_path = None

    if settings.LOG_TO_FILE:
        try:
            os.makedirs(settings.LOG_DIRECTORY, exist_ok=True)
            log_file_path = os.path.join(settings.LOG_DIRECTORY, f'{settings.SERVICE_NAME}.log')
        except OSError as e:
            print(f"Error creating log directory: {e}", file=sys.stderr)

    try:
        logging.config.dictConfig(build_logging_config(level, log_file_path))
    except Exception as e:
        print(f"Error setting up logging configuration: {e}", file=sys.stderr)
        # Fallback to basic config
        logging.basicConfig(
            level=logging.INFO,
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            stream=sys.stderr,
        )
