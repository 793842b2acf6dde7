"""Logging configuration for wedgebound"""
import logging
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

from ..core.config import Config


def setup_logger(name: str = 'wedgebound', level: Optional[str] = None) -> logging.Logger:
    """
    Setup the package logger with rich formatting

    Library modules log through `logging.getLogger(__name__)`; their records
    propagate to this logger, so only the entry point calls setup_logger.

    Args:
        name: Logger name
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)

    Returns:
        Configured logger
    """
    if level is None:
        level = 'DEBUG' if Config.DEBUG else Config.LOG_LEVEL

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    # Remove existing handlers
    logger.handlers.clear()

    # Progress goes to stderr so stdout tables stay clean
    handler = RichHandler(
        console=Console(stderr=True),
        rich_tracebacks=True,
        show_time=True,
        show_path=False,
    )
    handler.setFormatter(logging.Formatter('%(message)s', datefmt='[%X]'))

    logger.addHandler(handler)
    logger.propagate = False

    return logger
