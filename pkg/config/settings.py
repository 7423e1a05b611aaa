# config/settings.py
import math
import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from core.errors import UsageError

ENV_PREFIX = "BIPARTITE_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

_dotenv_loaded = False


class Settings(BaseModel):
    log_level: str = "INFO"
    delimiter: str = "\t"
    log_base: float = math.e
    significance: float = Field(default=0.1, gt=0.0, lt=1.0)
    min_tail_fraction: float = Field(default=0.5, gt=0.0, le=1.0)
    workers: int = Field(default=1, ge=1)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in LOG_LEVELS:
            raise ValueError(f"unknown log level {value!r}")
        return value

    @field_validator("log_base")
    @classmethod
    def _usable_base(cls, value: float) -> float:
        if not value > 1.0 or not math.isfinite(value):
            raise ValueError("log base must be a finite number > 1")
        return value


def load_settings(**overrides) -> Settings:
    """Settings from ``.env`` / ``BIPARTITE_*`` variables, then explicit overrides."""
    global _dotenv_loaded
    if not _dotenv_loaded:
        load_dotenv()
        _dotenv_loaded = True

    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw != "":
            values[name] = raw
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Settings(**values)
    except ValidationError as e:
        raise UsageError(f"invalid settings: {e.errors()[0]['msg']}") from e
