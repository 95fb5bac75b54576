from pydantic_settings import BaseSettings
from typing import Optional
import os


class Settings(BaseSettings):
    PROJECT_NAME: str = "qmatroid workbench"
    DEBUG: bool = False
    # stdout carries results only, so keep the CLI quiet by default
    LOG_LEVEL: str = "WARNING"

    # Parallel census
    DEFAULT_SHARDS: Optional[int] = None
    MAX_WORKERS: Optional[int] = None

    # Budgets
    ENUMERATION_BUDGET: int = 2_000_000
    AXIOM_PAIR_BUDGET: int = 5_000_000
    SAMPLE_SIZE: int = 10_000
    EQUIVALENCE_CANDIDATE_BUDGET: int = 2_000_000

    # Memo cache
    CACHE_MAX_ENTRIES: int = 1_000_000
    CENSUS_CACHE_THRESHOLD: int = 100_000

    class Config:
        case_sensitive = True
        env_prefix = "QMAT_"
        env_file = ".env"
        extra = "ignore"

    @property
    def shard_count(self) -> int:
        """Shards used when the command line does not say"""
        return self.DEFAULT_SHARDS or os.cpu_count() or 1

    @property
    def worker_count(self) -> int:
        return self.MAX_WORKERS or os.cpu_count() or 1


settings = Settings()
