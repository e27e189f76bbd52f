"""
Centralised logging configuration for primindex.

Call setup_logging() once at startup (the click group callback in primindex/main.py).
All other modules obtain their logger with:
    import logging
    logger = logging.getLogger(__name__)

Log level is controlled by the LOG_LEVEL environment variable (default INFO).
Everything goes to stderr so that JSON/CSV/DOT on stdout stays pipeable.
"""

import logging
import os
import sys


def setup_logging(level_name: str | None = None) -> None:
    level_name = (level_name or os.getenv("LOG_LEVEL", "INFO")).upper()
    level = getattr(logging, level_name, logging.INFO)

    fmt = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
    datefmt = "%Y-%m-%d %H:%M:%S"

    logging.basicConfig(level=level, format=fmt, datefmt=datefmt, stream=sys.stderr, force=True)

    # Quieten noisy third-party libraries
    for lib in ("pydot", "matplotlib", "PIL"):
        logging.getLogger(lib).setLevel(logging.WARNING)
