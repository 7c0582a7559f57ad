"""
Runtime settings read from the environment.

FRACSOB_THREADS caps the worker pool used by the double sums and corpus loops;
FRACSOB_LOG_LEVEL sets the default CLI log level.
"""

import logging
import os
from typing import Mapping, Optional

from pydantic import Field, ValidationError, field_validator

from .models.base import FracsobBaseModel
from .models.validation import InvalidArgumentError

logger = logging.getLogger(__name__)

THREADS_ENV = "FRACSOB_THREADS"
LOG_LEVEL_ENV = "FRACSOB_LOG_LEVEL"


class Settings(FracsobBaseModel):
    threads: int = Field(..., ge=1, description="Maximum worker threads")
    log_level: str = Field("WARNING", description="Default log level for the CLI")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"):
            raise ValueError(f"Unknown log level {value}")
        return value

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        env = os.environ if environ is None else environ
        default_threads = max(1, min(4, os.cpu_count() or 1))
        raw = env.get(THREADS_ENV)
        if raw is None or raw.strip() == "":
            threads = default_threads
        else:
            try:
                threads = int(raw)
            except ValueError:
                raise InvalidArgumentError(f"{THREADS_ENV}={raw!r} is not an integer")
            if threads < 1:
                raise InvalidArgumentError(f"{THREADS_ENV}={raw!r} must be >= 1")
        try:
            return cls(threads=threads, log_level=env.get(LOG_LEVEL_ENV, "WARNING"))
        except ValidationError as e:
            raise InvalidArgumentError(f"Invalid {LOG_LEVEL_ENV}: {e}") from e


def get_settings() -> Settings:
    return Settings.from_env()
