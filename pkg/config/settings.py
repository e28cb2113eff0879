"""
Application Configuration Settings

This module contains all configuration settings for the Gray Hole Guard
simulator, its run ledger and its HTTP API.
"""

from pathlib import Path

from pydantic_settings import BaseSettings

# Project root directory
PROJECT_ROOT = Path(__file__).parent.parent


class Settings(BaseSettings):
    """Application settings with environment variable support."""

    # Application Information
    APP_NAME: str = "🛡️ Gray Hole Guard"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = (
        "Discrete-event AODV simulator with a four-phase gray hole defense "
        "(trust monitoring, route probing, hash challenge, quarantine)"
    )

    # Server Configuration
    HOST: str = "0.0.0.0"
    PORT: int = 8000
    RELOAD: bool = False
    WORKERS: int = 1

    # Database Configuration (run ledger)
    DATABASE_URL: str = f"sqlite:///{PROJECT_ROOT}/data/grayhole_guard.db"

    # Simulation Defaults
    DEFAULT_SEED: int = 1
    DEFAULT_NODE_COUNT: int = 100
    PER_HOP_DELAY_MS: int = 2
    EPOCH_MS: int = 100
    N_BLOCKS: int = 10

    # Sweep Defaults
    SWEEP_WORKERS: int = 1
    SWEEP_RATIOS: str = "0:0.30:0.05"
    SWEEP_SEEDS: int = 10
    MAX_API_SWEEP_RUNS: int = 200

    # CORS Configuration
    ALLOWED_ORIGINS: list = ["*"]
    ALLOWED_METHODS: list = ["*"]
    ALLOWED_HEADERS: list = ["*"]

    # Pagination Configuration
    DEFAULT_PAGE_SIZE: int = 20
    MAX_PAGE_SIZE: int = 100

    # Logging Configuration
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # File Paths
    DATA_DIR: Path = PROJECT_ROOT / "data"
    SCENARIOS_DIR: Path = PROJECT_ROOT / "data" / "scenarios"
    RESULTS_DIR: Path = PROJECT_ROOT / "results"
    LOGS_DIR: Path = PROJECT_ROOT / "logs"

    class Config:
        env_file = ".env"
        case_sensitive = True


# Global settings instance
settings = Settings()

# Ensure directories exist
settings.DATA_DIR.mkdir(exist_ok=True)
settings.RESULTS_DIR.mkdir(exist_ok=True)
settings.LOGS_DIR.mkdir(exist_ok=True)
