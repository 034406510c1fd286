"""
Configuration settings for the quadratic formal power series engine
"""
import os
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict

_CORS_ORIGINS_ENV: Optional[str] = os.getenv("QFPS_CORS_ORIGINS")


class Settings(BaseSettings):
    """Application settings"""

    model_config = SettingsConfigDict(
        env_prefix="QFPS_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # App Configuration
    APP_NAME: str = "Quadratic Formal Power Series API"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # API Configuration
    API_V1_PREFIX: str = "/api/v1"
    # Comma-separated override through QFPS_CORS_ORIGINS
    BACKEND_CORS_ORIGINS: list = (
        _CORS_ORIGINS_ENV.split(",") if _CORS_ORIGINS_ENV
        else [
            "http://localhost:3000",
            "http://localhost:8000",
        ]
    )

    # QDE search
    MAX_INDEX: int = 21  # delta_2 bound, order <= 4
    VERIFY_SOLUTIONS: bool = True

    # Differential tower
    TOWER_DEPTH_LIMIT: int = 16
    MAX_ANGLE_MULTIPLE: int = 12

    # Series oracle
    VALUATION_CAP: int = 64
    MAX_EXTRA_PRECISION: int = 128

    # Normal forms
    CHECK_DEPTH: int = 12


settings = Settings()
