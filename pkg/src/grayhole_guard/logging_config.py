"""
Logging Configuration

This module configures the standard logging tree from the application
settings.
"""

import logging
from typing import Optional

from config.settings import settings


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """
    Configure root logging once for the CLI, the API and scripts.

    Args:
        level: Level name overriding settings.LOG_LEVEL
        log_file: File name under settings.LOGS_DIR to log into as well
    """
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(settings.LOGS_DIR / log_file))
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format=settings.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
