"""Environment-driven settings and logging setup."""

import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from app.core.errors import UsageError

# Load .env from backend/ directory (local dev); deployments inject env vars directly
env_path = Path(__file__).resolve().parent.parent.parent / ".env"
if env_path.exists():
    load_dotenv(env_path)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
LOG_FORMAT = "%(asctime)s [%(name)s] %(levelname)s: %(message)s"

DEFAULT_BUDGET_EVALUATIONS = 10**7


@dataclass(frozen=True)
class Settings:
    output_dir: str
    workers: int
    log_level: str
    default_budget: int


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def get_settings() -> Settings:
    """Read settings from the environment on every call so tests can monkeypatch it."""
    return Settings(
        output_dir=os.environ.get("NSGA3_OUTPUT_DIR", "results"),
        workers=max(1, _int_env("NSGA3_WORKERS", 1)),
        log_level=os.environ.get("NSGA3_LOG_LEVEL", "INFO").upper(),
        default_budget=_int_env("NSGA3_DEFAULT_BUDGET", DEFAULT_BUDGET_EVALUATIONS),
    )


def configure_logging(level: str | None = None):
    name = (level or get_settings().log_level).upper()
    if name not in LOG_LEVELS:
        raise UsageError(f"Unknown log level {name!r}; use one of {LOG_LEVELS}")
    logging.basicConfig(level=name, format=LOG_FORMAT)
