"""Logging setup for syncbase, rendered through rich."""

import logging

from rich.logging import RichHandler

_ROOT = "syncbase"


def configure_logging(level: str | int = "INFO") -> logging.Logger:
    """Attach a rich handler to the package logger.

    Calling this more than once only updates the level.

    Args:
        level (str | int, optional): The log level. Defaults to "INFO".

    Returns:
        logging.Logger: The package root logger.
    """
    logger = logging.getLogger(_ROOT)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(show_path=False, rich_tracebacks=False, markup=False)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
        logger.propagate = False
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    return logger


def get_logger(name: str) -> logging.Logger:
    """Return a logger below the package root.

    Args:
        name (str): Usually `__name__` of the calling module.

    Returns:
        logging.Logger: The logger.
    """
    return logging.getLogger(name if name.startswith(_ROOT) else f"{_ROOT}.{name}")
