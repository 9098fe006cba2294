from functools import lru_cache
from typing import Literal, get_args

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
LOG_LEVELS: tuple[str, ...] = get_args(LogLevel)


class FalsifySettings(BaseSettings):
    """Defaults for the falsification procedures, overridable from `IVFALSIFY_*` variables."""

    model_config = SettingsConfigDict(env_prefix="IVFALSIFY_", extra="ignore")

    # Decision rule
    alpha: float = Field(default=0.05, gt=0, lt=1)

    # 2x2 tests
    exact_threshold: int = Field(default=200, ge=1)
    grid_step: float = Field(default=1e-4, gt=0, lt=0.5)
    refine_xatol: float = Field(default=1e-7, gt=0)

    # Geometry
    boundary_tol: float = Field(default=1e-9, ge=0)

    # Monte Carlo
    workers: int = Field(default=1, ge=1)

    log_level: LogLevel = "WARNING"

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper(cls, value: object) -> object:
        return value.upper() if isinstance(value, str) else value


@lru_cache(maxsize=1)
def get_settings() -> FalsifySettings:
    """Return the process-wide settings."""
    return FalsifySettings()
