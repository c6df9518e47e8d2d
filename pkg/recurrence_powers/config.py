import os
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError

# Environment variable -> Settings field
ENV_KEYS = {
    "RPL_PRECISION_BITS": "precision_bits",
    "RPL_N_CAP": "n_cap",
    "RPL_N_MAX_HARD": "n_max_hard",
    "RPL_FACTOR_BUDGET_MS": "factor_budget_ms",
    "RPL_PRESETS": "presets_path",
    "RPL_LOG_LEVEL": "log_level",
    "RPL_WORKERS": "workers",
}


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    precision_bits: int = Field(default=128, ge=53, description="Working precision of interval arithmetic")
    n_cap: int = Field(default=10**6, ge=0, description="Default enumeration cap on n")
    n_max_hard: int = Field(default=10**6, ge=0, description="Hard ceiling on any index n")
    factor_budget_ms: int = Field(default=2000, ge=1, description="Time budget per factorization")
    presets_path: Optional[str] = Field(default=None, description="Replacement presets file")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="WARNING", description="Root logging level for the CLI"
    )
    workers: int = Field(default=1, ge=1, description="Process count for scans and enumeration")
    relative_width_target: float = Field(default=1e-12, gt=0, description="Auto-refinement stops below this width")
    max_precision_bits: int = Field(default=4096, ge=64, description="Auto-refinement ceiling")
    scan_top: int = Field(default=20, ge=1, description="Entries kept by the quality scan")

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper_level(cls, value):
        return value.upper() if isinstance(value, str) else value


def get_environment_variables():
    """Get RPL_* variables from the environment (a .env file is loaded first)"""
    load_dotenv()
    variables = {}
    for key, field in ENV_KEYS.items():
        value = os.getenv(key)
        if value:
            variables[field] = value
    return variables


def load_settings(**overrides) -> Settings:
    values = get_environment_variables()
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


DEFAULT_SETTINGS = Settings()
