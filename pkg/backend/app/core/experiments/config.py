"""Flat ``key = value`` experiment files (``#`` comments) parsed with python-dotenv."""

import logging
from pathlib import Path
from typing import Any, Mapping, Optional

from dotenv import dotenv_values

from app.core.errors import ExperimentIOError, UsageError
from app.models.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

CONFIG_KEYS = frozenset(
    {"n", "m", "k", "mu", "pc", "lattice_p", "eps_nad", "budget", "trials", "seed", "out", "trajectories", "config_id"}
)
# file/CLI key -> ExperimentConfig field
_RENAMED = {"seed": "master_seed"}


def load_config_file(path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ExperimentIOError(path, "config file not found")
    try:
        values = dotenv_values(path)
    except OSError as exc:
        raise ExperimentIOError(path, exc.strerror or str(exc)) from exc

    unknown = sorted(set(values) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"{path}: unknown config keys {unknown}; allowed: {sorted(CONFIG_KEYS)}")
    missing_value = sorted(key for key, value in values.items() if value is None or value == "")
    if missing_value:
        raise UsageError(f"{path}: keys without a value: {missing_value}")
    logger.debug(f"Loaded {len(values)} keys from {path}")
    return dict(values)


def build_config(file_values: Optional[Mapping[str, Any]] = None, **overrides: Any) -> ExperimentConfig:
    """Merge file values with overrides (None means "not given") into a validated config."""
    merged: dict[str, Any] = dict(file_values or {})
    merged.update({key: value for key, value in overrides.items() if value is not None})
    unknown = sorted(set(merged) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"Unknown config keys {unknown}")
    return ExperimentConfig(**{_RENAMED.get(key, key): value for key, value in merged.items()})
