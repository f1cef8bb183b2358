"""Logging wiring for the command line and long numerical runs."""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Optional, Union

from .errors import WeierkernError

LOGGER_NAME = "weierkern"

DETAILED_FORMAT = '%(asctime)s [%(levelname)s] %(name)s:%(lineno)d - %(message)s'
SIMPLE_FORMAT = '%(asctime)s [%(levelname)s] - %(message)s'

# (file name, level, max bytes, backups)
LOG_FILES = (
    ("weierkern.log", logging.DEBUG, 4 * 1024 * 1024, 4),
    ("errors.log", logging.ERROR, 1024 * 1024, 2),
)


def _rotating(path: Path, level: int, max_bytes: int, backups: int) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(path, maxBytes=max_bytes, backupCount=backups,
                                                   encoding="utf-8")
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(DETAILED_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
    return handler


def setup_logging(level: Union[int, str] = logging.WARNING,
                  log_dir: Optional[Path] = None) -> logging.Logger:
    """Attach a stderr console handler, plus the rotating files of LOG_FILES when ``log_dir`` is set.

    Calling it twice replaces the handlers instead of stacking them.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()

    # stdout carries the JSON result
    console = logging.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(logging.Formatter(SIMPLE_FORMAT, datefmt='%H:%M:%S'))
    logger.addHandler(console)

    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        for name, file_level, max_bytes, backups in LOG_FILES:
            logger.addHandler(_rotating(log_dir / name, file_level, max_bytes, backups))

    return logger


def log_error_with_context(error: Exception, context: str = "") -> None:
    """One ERROR record for a failed command; package errors carry their kind and exit code."""
    logger = logging.getLogger(LOGGER_NAME)
    if isinstance(error, WeierkernError):
        logger.error("%s failed [%s, exit %d]: %s", context or "command", error.kind, error.exit_code,
                     error.detail)
    else:
        logger.error("%s failed [%s]: %s", context or "command", type(error).__name__, error)
    logger.debug("traceback for %s", context or "command", exc_info=error)
