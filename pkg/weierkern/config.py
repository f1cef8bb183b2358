import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from .errors import ConfigError

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    threads: int = Field(default=1)  # worker cap for quadrature cell batches, contour nodes, matrix rows and MC chunks
    log_dir: Optional[Path] = None  # rotating log files only when set
    log_level: str = Field(default="WARNING")  # DEBUG, INFO, WARNING, ERROR

    @field_validator("threads")
    @classmethod
    def at_least_one(cls, value):
        return max(1, int(value))

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_level(cls, value):
        if isinstance(value, str):
            value = value.strip().upper() or "WARNING"
        if value not in LOG_LEVELS:
            raise ValueError(f"unknown log level {value!r}")
        return value


def get_settings() -> Settings:
    # Environment wins over the defaults; nothing is cached so tests can monkeypatch.
    log_dir = os.getenv("WEIERKERN_LOG_DIR")
    try:
        return Settings(
            threads=os.getenv("WEIERKERN_THREADS", "1"),
            log_dir=Path(log_dir) if log_dir else None,
            log_level=os.getenv("WEIERKERN_LOG_LEVEL", "WARNING"),
        )
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"WEIERKERN_{field.upper()}: {first['msg']}") from exc
