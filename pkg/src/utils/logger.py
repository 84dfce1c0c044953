"""Logging setup shared by the library modules and the CLI."""
import logging
import sys
from pathlib import Path
from typing import Optional

PACKAGE_LOGGER = "monotone_codec"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# Handler names owned by setup_logger; anything else on the logger is left alone.
CONSOLE_HANDLER = "monocode-console"
FILE_HANDLER = "monocode-file"


def _owned_handler(handler: logging.Handler, name: str, level: int) -> logging.Handler:
    handler.set_name(name)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    return handler


def setup_logger(
    name: str = PACKAGE_LOGGER,
    level: int = logging.INFO,
    log_file: Optional[Path] = None,
    console_output: bool = True
) -> logging.Logger:
    """Configure a logger with a stderr console handler and an optional log file.

    Calling it again replaces the handlers it created earlier, so the console
    handler always writes to the current ``sys.stderr``.

    Args:
        name: Logger name ("" for the root logger, which the CLI uses)
        level: Logging level
        log_file: Optional path to a log file
        console_output: Whether to attach the console handler

    Returns:
        The configured logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    for handler in list(logger.handlers):
        if handler.get_name() in (CONSOLE_HANDLER, FILE_HANDLER):
            logger.removeHandler(handler)
            if handler.get_name() == FILE_HANDLER:
                handler.close()

    if console_output:
        logger.addHandler(_owned_handler(logging.StreamHandler(sys.stderr), CONSOLE_HANDLER, level))

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.addHandler(_owned_handler(logging.FileHandler(log_file), FILE_HANDLER, level))

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Module logger; records propagate to whatever setup_logger configured."""
    return logging.getLogger(name or PACKAGE_LOGGER)


def parse_level(value: Optional[str], default: int = logging.INFO) -> int:
    """Translate a level name such as "debug" into a logging constant."""
    if not value:
        return default
    level = logging.getLevelName(value.strip().upper())
    return level if isinstance(level, int) else default
