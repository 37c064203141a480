# -*- coding: utf-8 -*-
"""Logging utilities.

Every record carries the name of the scenario being processed in
`extra["scenario"]`, `"-"` outside of a scenario.
"""
import os
import sys
from typing import Optional, Literal

from loguru import logger

LOG_LEVEL = Literal[
    "TRACE",
    "DEBUG",
    "INFO",
    "SUCCESS",
    "WARNING",
    "ERROR",
    "CRITICAL",
]

_NO_SCENARIO = "-"

_DEFAULT_LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{"
    "level: <8}</level> | <magenta>{extra[scenario]}</magenta> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
    "<level>{message}</level>"
)


def setup_logger(
    path_log: Optional[str] = None,
    level: LOG_LEVEL = "INFO",
) -> None:
    r"""Route `loguru.logger` to stderr and, if `path_log` is given, to
    `path_log/logging.log`.

    Args:
        path_log (`Optional[str]`, defaults to `None`):
            The log directory, created if missing.
        level (`LOG_LEVEL`, defaults to `"INFO"`):
            The lowest level written to either sink.
    """
    logger.remove()
    logger.configure(extra={"scenario": _NO_SCENARIO})
    logger.add(
        sys.stderr,
        format=_DEFAULT_LOG_FORMAT,
        level=level,
    )

    if path_log is not None:
        os.makedirs(path_log, exist_ok=True)
        # sweep workers write to the same file
        logger.add(
            os.path.join(path_log, "logging.log"),
            format=_DEFAULT_LOG_FORMAT,
            level=level,
            enqueue=True,
        )


def bind_scenario(name: Optional[str]) -> None:
    """Tag the following records with a scenario name, or clear the tag
    with `None`."""
    logger.configure(extra={"scenario": name or _NO_SCENARIO})
