"""Environment overrides read from the process environment or a `.env` file."""
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .exceptions import ConfigurationError

CONFIG_VAR = 'MONOCODE_CONFIG'
LOG_LEVEL_VAR = 'MONOCODE_LOG_LEVEL'


class EnvLoader:
    """Loads MONOCODE_* overrides; variables already set in the environment win over `.env`."""

    def __init__(self, env_path: Optional[str] = None):
        """Initialize environment loader.

        Args:
            env_path: Path to .env file (default: .env in project root)
        """
        if env_path is None:
            env_path = Path(__file__).parent.parent.parent / ".env"
        self.env_path = Path(env_path)
        if self.env_path.exists():
            load_dotenv(self.env_path)
        else:
            load_dotenv()

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        """Value of key, or default when unset or empty."""
        value = os.getenv(key)
        return value if value else default

    def config_path(self) -> Optional[Path]:
        """Override config file named by MONOCODE_CONFIG.

        Raises:
            ConfigurationError: If the variable names a file that does not exist
        """
        value = self.get(CONFIG_VAR)
        if value is None:
            return None
        path = Path(value).expanduser()
        if not path.is_file():
            raise ConfigurationError(f"{CONFIG_VAR} points to a missing file: {path}")
        return path

    def log_level(self) -> Optional[str]:
        """Level name from MONOCODE_LOG_LEVEL, upper-cased."""
        value = self.get(LOG_LEVEL_VAR)
        return value.strip().upper() if value else None
