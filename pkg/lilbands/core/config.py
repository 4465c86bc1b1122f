from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # === PUBLIC DATA ===
    PROJECT_NAME: str = "lil-bands"

    # === LOGGING ===
    LOG_LEVEL: str = Field(default="INFO")
    LOG_CONFIG: str = Field(default="logging.ini", description="fileConfig-style logging setup, used when present")

    # === STATISTICAL DEFAULTS (numerical example: n = 500, nu = 1.1, alpha = 5%) ===
    DEFAULT_NU: float = Field(default=1.1, gt=1.0, description="Weight of the D(t) penalty term")
    DEFAULT_ALPHA: float = Field(default=0.05, gt=0.0, lt=1.0, description="Test level / band miscoverage")
    DEFAULT_REPS: int = Field(default=40000, ge=100, description="Monte-Carlo replicates for critical values")
    DEFAULT_SEED: int = Field(default=20140301, ge=0, description="Base seed of the replicate substreams")
    DEFAULT_PVALUE_REPS: int = Field(default=999, ge=1, description="Replicates behind Monte-Carlo p-values")
    DEFAULT_LIMIT_GRID: int = Field(default=10000, ge=3, description="Logit grid size for Brownian bridge paths")

    # === EXECUTION ===
    DEFAULT_THREADS: int = Field(default=1, ge=1, description="Worker processes for Monte-Carlo replicates")
    MC_CHUNK_SIZE: int = Field(default=256, ge=1, description="Replicates evaluated per batch")

    # === STORAGE AND OUTPUT ===
    CACHE_DIR: str = Field(default=".lilbands_cache", description="Directory of cached quantile tables")
    CSV_SIGNIFICANT_DIGITS: int = Field(default=12, ge=1, le=17)
    JSON_SIGNIFICANT_DIGITS: int = Field(default=17, ge=1, le=17)

    @property
    def cache_path(self) -> Path:
        """Cache directory as a path, with ~ expanded"""
        return Path(self.CACHE_DIR).expanduser()


settings = Settings()
