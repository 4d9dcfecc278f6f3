"""Logging for maasslab.

Console output goes to stderr so the summary table on stdout stays clean.
Module loggers (``maasslab.core.gamma`` and so on) hand their records to the
``maasslab`` package logger, which owns the handlers.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

PACKAGE_LOGGER = "maasslab"

_PLAIN_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"
_FILE_FORMAT = "%(asctime)s %(levelname)-8s %(name)s.%(funcName)s:%(lineno)d %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _console_handler(rich_formatting: bool) -> logging.Handler:
    if rich_formatting:
        try:
            from rich.console import Console
            from rich.logging import RichHandler

            # messages carry literal brackets from intervals and index lists
            return RichHandler(
                console=Console(stderr=True),
                rich_tracebacks=True,
                markup=False,
                show_path=False,
            )
        except ImportError:
            pass
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(_PLAIN_FORMAT, datefmt=_DATE_FORMAT))
    return handler


def _file_handler(log_file: Path) -> logging.Handler:
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file, encoding="utf-8")
    handler.setFormatter(logging.Formatter(_FILE_FORMAT, datefmt=_DATE_FORMAT))
    return handler


def setup_logger(
    name: str = PACKAGE_LOGGER,
    level: int = logging.INFO,
    log_file: Optional[Path] = None,
    rich_formatting: bool = True,
) -> logging.Logger:
    """
    Configure a logger, replacing any handlers it already has.

    Args:
        name: Logger name, normally the package logger
        level: Level applied to the logger and each handler
        log_file: Optional file that receives the same records with call sites
        rich_formatting: Use Rich for console output when it is installed

    Returns:
        The configured logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.handlers.clear()

    handlers = [_console_handler(rich_formatting)]
    if log_file:
        handlers.append(_file_handler(Path(log_file)))
    for handler in handlers:
        handler.setLevel(level)
        logger.addHandler(handler)

    logger.propagate = False
    return logger


def get_logger(name: str) -> logging.Logger:
    """Logger for ``name``; the package logger gets default handlers on first use."""
    logger = logging.getLogger(name)
    if name == PACKAGE_LOGGER or name.startswith(PACKAGE_LOGGER + "."):
        if not logging.getLogger(PACKAGE_LOGGER).handlers:
            setup_logger(PACKAGE_LOGGER)
        return logger
    if not logger.handlers:
        return setup_logger(name)
    return logger
