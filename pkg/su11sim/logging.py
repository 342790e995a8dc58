# su11sim/logging.py
from __future__ import annotations

import logging
import sys
from typing import TextIO


def setup_logging(
    debug: bool = False,
    level: str | None = None,
    stream: TextIO | None = None,
) -> None:
    """
    Central logging configuration for the simulator.

    - One console handler (stderr by default, so CSV on stdout stays clean)
    - Timestamped, pipe-separated records
    - Python warnings (numpy RuntimeWarning etc.) routed into logging
    """

    if debug:
        resolved = logging.DEBUG
    else:
        resolved = logging.getLevelName((level or "INFO").strip().upper())
        if not isinstance(resolved, int):
            resolved = logging.INFO

    logging.basicConfig(
        level=resolved,
        format=(
            "%(asctime)s | %(levelname)s | "
            "%(name)s | %(message)s"
        ),
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=[
            logging.StreamHandler(stream or sys.stderr),
        ],
        force=True,
    )

    # Route warnings.warn() through the same handler
    logging.captureWarnings(True)
    logging.getLogger("py.warnings").setLevel(logging.WARNING)
