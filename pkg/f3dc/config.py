"""
Configuration settings for the F3DC kernel library
"""
from functools import lru_cache
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library and CLI settings loaded from environment variables (prefix F3DC_)."""

    model_config = SettingsConfigDict(
        env_prefix="F3DC_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    # App
    app_name: str = "F3DC"
    app_version: str = "1.0.0"
    debug: bool = False
    log_format: Literal["json", "console"] = "json"

    # Checked build: accumulator bounds, integrality, bounds-checked reads
    strict_checks: bool = True

    # Engine
    threads: int = 1
    seed: int = 0
    transform_set_path: str | None = None

    # Fast processing array (defaults describe the 2x2 FPU prototype)
    fpu_count: int = 4
    multipliers_per_fpu: int = 512
    clock_hz: float = 150e6
    dsp_total: int = 2048
    fpa_rows: int = 2
    fpa_cols: int = 2

    # Reference throughput for utilization reports
    target_gops: float = 1700.0

    @property
    def log_level(self) -> str:
        return "DEBUG" if self.debug else "INFO"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
