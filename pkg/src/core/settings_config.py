import logging

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Application settings loaded from environment variables with defaults."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="FOLIATE_",
        extra="ignore",
    )

    # Output Configuration
    output_dir: str = Field(
        default="output", description="Default directory for CSV and report files."
    )

    # Logging Configuration
    log_level: str = Field(default="INFO", description="Root logger level.")

    def apply_log_level(self, level: str | None = None) -> None:
        """
        Apply a log level to the root logger.

        Args:
            level: Level name; defaults to the configured ``log_level``.
        """
        name = (level or self.log_level).upper()
        numeric = logging.getLevelName(name)
        if not isinstance(numeric, int):
            logger.warning(f"Unknown log level '{name}', keeping current level")
            return
        logging.getLogger().setLevel(numeric)


settings = Settings()
