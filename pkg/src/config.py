from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
MIN_CURVE_SAMPLES = 512


def _parse_int_env(name: str, raw_value: str | None, default: int, minimum: int) -> int:
    if raw_value is None:
        return default
    text = raw_value.strip()
    if not text:
        return default
    try:
        value = int(text)
    except ValueError:
        logger.warning("Invalid %s value (not an integer): %r", name, raw_value)
        return default
    if value < minimum:
        logger.warning("Invalid %s value (must be >= %d): %r", name, minimum, raw_value)
        return default
    return value


def _parse_float_env(name: str, raw_value: str | None, default: float) -> float:
    if raw_value is None or not raw_value.strip():
        return default
    try:
        value = float(raw_value.strip())
    except ValueError:
        logger.warning("Invalid %s value (not a number): %r", name, raw_value)
        return default
    if not value >= 0.0:
        logger.warning("Invalid %s value (must be >= 0): %r", name, raw_value)
        return default
    return value


def _parse_log_level(raw_value: str | None) -> str:
    text = str(raw_value or "").strip().upper()
    if not text:
        return "INFO"
    if text not in _LOG_LEVELS:
        logger.warning("Invalid GHZW_LOG_LEVEL value: %r", raw_value)
        return "INFO"
    return text


@dataclass(frozen=True)
class Config:
    log_level: str = "INFO"
    seed: int = 0
    twirl_samples: int = 0
    curve_samples: int = 1024
    coord_snap: float = 1e-6

    @classmethod
    def from_env(cls, env_file: Path | None = None) -> Config:
        if env_file is not None:
            load_dotenv(env_file, override=False)
        else:
            load_dotenv(override=False)
        return cls(
            log_level=_parse_log_level(os.environ.get("GHZW_LOG_LEVEL")),
            seed=_parse_int_env("GHZW_SEED", os.environ.get("GHZW_SEED"), 0, 0),
            twirl_samples=_parse_int_env("GHZW_TWIRL_SAMPLES", os.environ.get("GHZW_TWIRL_SAMPLES"), 0, 0),
            curve_samples=_parse_int_env(
                "GHZW_CURVE_SAMPLES", os.environ.get("GHZW_CURVE_SAMPLES"), 1024, MIN_CURVE_SAMPLES
            ),
            coord_snap=_parse_float_env("GHZW_COORD_SNAP", os.environ.get("GHZW_COORD_SNAP"), 1e-6),
        )
