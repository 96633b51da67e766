"""
Configuration settings for xdelta
"""
import os
from enum import Enum
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

PACKAGE_DIR = Path(__file__).resolve().parent


class OutputFormat(str, Enum):
    """Report formats understood by the CLI"""
    TEXT = "text"
    JSON = "json"
    MD = "md"


class Config(BaseModel):
    """Application configuration"""

    # =========================
    # Bundled data
    # =========================
    data_dir: Path = PACKAGE_DIR / "data"
    fixtures_dir: Path = PACKAGE_DIR / "fixtures"

    # =========================
    # Survey
    # =========================
    max_n: int = 81
    jobs: int = 1  # survey worker threads; output order never depends on it

    # Degree of the points under study (cubic points)
    point_degree: int = 3

    # =========================
    # Output
    # =========================
    output_format: OutputFormat = OutputFormat.TEXT
    console_width: int = 120  # fixed so text tables are byte-reproducible
    error_color: str = "red"
    warning_color: str = "yellow"
    success_color: str = "green"

    # Logging
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "Config":
        """Build a config from XDELTA_* environment variables (and a .env file)"""
        load_dotenv()
        overrides = {}
        env_map = {
            "XDELTA_DATA_DIR": "data_dir",
            "XDELTA_FIXTURES_DIR": "fixtures_dir",
            "XDELTA_MAX_N": "max_n",
            "XDELTA_FORMAT": "output_format",
            "XDELTA_JOBS": "jobs",
            "XDELTA_LOG_LEVEL": "log_level",
        }
        for env_name, field_name in env_map.items():
            value = os.environ.get(env_name)
            if value:
                overrides[field_name] = value
        return cls(**overrides)


class ReportConfig(BaseModel):
    """Per-invocation report settings assembled from the global CLI flags"""

    format: OutputFormat = OutputFormat.TEXT
    fixtures_dir: Optional[Path] = None
    data_dir: Path = PACKAGE_DIR / "data"
    max_n: int = Field(default=81)

    model_config = {"frozen": True}

    @field_validator("max_n")
    @classmethod
    def _check_max_n(cls, value: int) -> int:
        if value < 3:
            raise ValueError("max_n must be at least 3")
        return value


# Global config instance
config = Config.from_env()
