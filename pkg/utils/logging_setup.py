"""Logging for the oscnorm library and CLI.

All records go through the ``oscnorm`` logger. Library modules take a child logger with
get_logger(name) at import time; only setup_logging() attaches handlers. Console output goes to
stderr because stdout carries the CSV/JSON tables.
"""

from __future__ import annotations

import logging
import logging.handlers
import sys

ROOT_LOGGER_NAME = 'oscnorm'

_CONSOLE_FORMAT = "%(levelname)s: %(name)s: %(message)s"
_FILE_FORMAT = "%(asctime)s [%(levelname)8s] %(name)s:%(lineno)d - %(message)s"

LOG_FILE_MAX_BYTES = 10 * 1024 * 1024
LOG_FILE_BACKUPS = 5

LOG_LEVELS = {
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
    'CRITICAL': logging.CRITICAL,
}

_configured = False


def _level(name: str | None, fallback: int | None = None) -> int | None:
    if not name:
        return fallback
    return LOG_LEVELS.get(name.upper(), fallback)


def _console_handler(level: int) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(_CONSOLE_FORMAT))
    return handler


def _file_handler(path: str, level: int) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        path, maxBytes=LOG_FILE_MAX_BYTES, backupCount=LOG_FILE_BACKUPS, encoding='utf-8'
    )
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(_FILE_FORMAT))
    return handler


def setup_logging(
    level: str = 'WARNING',
    log_file: str | None = None,
    console_level: str | None = None,
    file_level: str | None = None,
) -> logging.Logger:
    """Configure the ``oscnorm`` logger.

    The first call attaches a stderr handler and, with ``log_file``, a rotating file handler
    (10 MB, 5 backups). Later calls only change the levels of the logger and its handlers, so the
    CLI can apply the level from its configuration file after parsing arguments.

    Args:
        level: 'DEBUG', 'INFO', 'WARNING', 'ERROR' or 'CRITICAL'; unknown names mean WARNING
        log_file: optional path of the rotating log file
        console_level: console threshold (defaults to level)
        file_level: file threshold (defaults to level)
    """
    global _configured

    root = logging.getLogger(ROOT_LOGGER_NAME)
    base = _level(level, logging.WARNING)
    root.setLevel(base)
    if _configured:
        for handler in root.handlers:
            if isinstance(handler, logging.handlers.RotatingFileHandler):
                handler.setLevel(_level(file_level, base))
            else:
                handler.setLevel(_level(console_level, base))
        return root

    root.propagate = False
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    console = _console_handler(_level(console_level, base))
    root.addHandler(console)
    if log_file:
        try:
            root.addHandler(_file_handler(log_file, _level(file_level, base)))
        except OSError as e:
            root.warning(f"Could not open log file {log_file}: {e}")

    _configured = True
    root.debug("Logging configured")
    return root


def get_logger(name: str) -> logging.Logger:
    """The child logger ``oscnorm.<name>``."""
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def reset_logging() -> None:
    """Close and drop the handlers so the next setup_logging() starts fresh (used by tests)."""
    global _configured
    root = logging.getLogger(ROOT_LOGGER_NAME)
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        handler.close()
    _configured = False
