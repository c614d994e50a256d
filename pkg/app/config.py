from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values, load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="LAMBDACOUNT_", env_file=".env", extra="ignore")

    # Application Configuration
    app_name: str = "lambdacount"
    app_version: str = "1.0.0"
    log_level: str = "WARNING"

    # Cache Configuration
    cache_dir: Optional[Path] = None

    # Resource caps
    max_n: int = 2000
    enumerate_max_n: int = 18
    max_attempts: int = 1_000_000
    time_budget: float = 300.0

    # Model defaults
    default_preset: str = "natural"
    sampler_level: int = 20
    sampler_epsilon: float = 0.1
    constant_level: int = 100
    root_tolerance: float = 1e-12


def read_config_file(path: Path) -> Dict[str, Any]:
    """Read `key = value` lines, keeping only keys Settings knows about"""
    values = dotenv_values(path)
    known = Settings.model_fields
    return {
        key.strip().lower(): value
        for key, value in values.items()
        if value is not None and key.strip().lower() in known
    }


def load_settings(config_file: Optional[Path] = None, **overrides: Any) -> Settings:
    """Merge defaults, environment, config file and flag overrides (flags win)"""
    merged: Dict[str, Any] = Settings().model_dump()
    if config_file is not None:
        merged.update(read_config_file(config_file))
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**merged)


settings = Settings()


def apply_settings(resolved: Settings) -> Settings:
    """Copy resolved values onto the shared settings object read by the services"""
    for key, value in resolved.model_dump().items():
        setattr(settings, key, value)
    return settings
