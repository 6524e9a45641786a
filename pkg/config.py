"""
Mather Hull Configuration
"""
from pydantic_settings import BaseSettings
from typing import List

class Settings(BaseSettings):
    # Application
    APP_NAME: str = "Mather Hull"
    APP_VERSION: str = "1.0.0"
    # DEBUG forces [DEBUG] lines on regardless of LOG_LEVEL
    DEBUG: str = "False"
    LOG_LEVEL: str = "INFO"

    # Internal parallelism cap (0 or 1 = serial)
    MATHER_HULL_THREADS: int = 0

    # Output
    OUTPUT_DIR: str = "results"
    FLOAT_FORMAT: str = "%.17g"

    # Samples per axis used when a solver validates a model on its own
    VALIDATION_SAMPLES: int = 32

    @property
    def DEBUG_BOOL(self) -> bool:
        """Convert DEBUG string to boolean"""
        return self.DEBUG.lower() == "true"

    @property
    def LOG_LEVELS(self) -> List[str]:
        """Levels that are printed, lowest first"""
        order = ["DEBUG", "INFO", "WARNING", "ERROR"]
        level = "DEBUG" if self.DEBUG_BOOL else self.LOG_LEVEL.upper()
        if level not in order:
            level = "INFO"
        return order[order.index(level):]

    @property
    def THREADS(self) -> int:
        """Worker count for internally parallel loops"""
        return max(1, self.MATHER_HULL_THREADS)

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"

settings = Settings()
