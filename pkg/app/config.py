"""Application configuration"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings"""

    # Application
    APP_NAME: str = "Pairsplit"
    VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Shoe
    DEFAULT_DECKS: int = 1

    # Dealer cache (per (up, pair) task)
    CACHE_BYTES: int = 64 * 1024 * 1024
    CACHE_DTYPE: str = "float64"  # float32 halves the slot size
    MAX_CACHE_DEPTH: int = 24
    CONDITIONED_CACHE_DEPTH: int = 8

    # Unique-hands lookup table depth (longest split hand)
    HAND_INDEX_DEPTH: int = 14

    # Game EV: dealer-natural probability per up card ("up-card") or per deal ("deal")
    NATURAL_WEIGHTING: str = "up-card"

    # Execution
    WORKERS: int = 1

    # Monte Carlo
    MC_TRIALS: int = 100_000
    MC_SEED: int = 20_080_101
    MC_BLOCKS: int = 16

    # Output
    TABLE_DECIMALS: int = 6
    OUTPUT_FORMAT: str = "csv"

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore"
    )


settings = Settings()
