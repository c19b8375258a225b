"""Runtime configuration, read from the environment."""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings for walkmax operations, the Celery worker and the report service."""

    model_config = SettingsConfigDict(env_prefix="WALKMAX_", populate_by_name=True)

    oracle_cap: int = Field(14, ge=0, description="Largest t accepted by the path oracle")
    mc_step_cap: int = Field(10_000_000, ge=1, description="Per-run step cap for Monte Carlo")
    capped_fraction_threshold: float = Field(1e-3, ge=0.0)
    kennedy_tolerance: float = Field(1e-10, gt=0.0)
    fractional_moment_tolerance: float = Field(1e-12, gt=0.0)
    fundamental_solve_limit: int = Field(10_000, ge=1)
    propagation_bits: int = Field(64, ge=1)
    mc_backend: Literal["threads", "celery"] = "threads"
    log_level: str = "INFO"

    celery_broker_url: str = Field(
        "redis://localhost:6379/0", validation_alias="CELERY_BROKER_URL"
    )
    celery_backend_url: str = Field(
        "redis://localhost:6379/1", validation_alias="CELERY_BACKEND_URL"
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings."""
    return Settings()
