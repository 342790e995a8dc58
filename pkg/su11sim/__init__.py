# su11sim/__init__.py
from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .logging import setup_logging

__version__ = "0.1.0"


# -----------------------------
# Env helpers
# -----------------------------
def _load_env() -> None:
    """
    Load .env for LOCAL DEV only, without overriding real environment variables.

    Rule:
    - If SU11_ENV_LOADED is already set (CI, wrapper scripts), do NOT read .env again.
    """
    if os.getenv("SU11_ENV_LOADED"):
        return

    project_root = Path(__file__).resolve().parent.parent
    env_path = project_root / ".env"
    if env_path.exists():
        load_dotenv(dotenv_path=env_path, override=False)
    os.environ["SU11_ENV_LOADED"] = "1"


def bootstrap(debug: Optional[bool] = None, log_level: Optional[str] = None) -> type:
    """
    Prepare the process: environment, settings and logging.

    Returns the Config class so callers can read resolved settings.
    """
    # ---------------------------------------------------------
    # 1) Load env BEFORE importing Config (local dev only)
    # ---------------------------------------------------------
    _load_env()

    # ---------------------------------------------------------
    # 2) Import config AFTER env is loaded
    # ---------------------------------------------------------
    from .config import Config

    # ---------------------------------------------------------
    # 3) Logging
    # ---------------------------------------------------------
    setup_logging(
        debug=Config.DEBUG if debug is None else debug,
        level=log_level or Config.LOG_LEVEL,
    )
    return Config
