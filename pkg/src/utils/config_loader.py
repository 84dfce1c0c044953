"""Configuration loader for the monotone codec."""
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .exceptions import ConfigurationError


@dataclass
class CodecDefaults:
    """Codec search configuration."""
    exhaustive_m_limit: int


@dataclass
class LabConfig:
    """Redundancy lab configuration."""
    trials: int
    seed: int
    table_cap: int
    max_symbol_bits: int
    series_head: int


@dataclass
class BoundsConfig:
    """Bound evaluator configuration."""
    eps: float
    grid_step: float
    nml_budget: int


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str


@dataclass
class AppConfig:
    """Complete application configuration."""
    codec: CodecDefaults
    lab: LabConfig
    bounds: BoundsConfig
    logging: LoggingConfig


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class ConfigLoader:
    """Loads and validates configuration files."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize config loader.

        Args:
            config_path: Optional YAML file whose keys override the bundled defaults
        """
        self.config_path = Path(config_path) if config_path else None
        self.config_dir = Path(__file__).parent.parent / "config"
        self.defaults_path = self.config_dir / "defaults.yaml"

    def _read_yaml(self, path: Path) -> Dict[str, Any]:
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}")
        try:
            with open(path, 'r') as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(
                f"Invalid YAML syntax in config file {path}: {str(e)}"
            )
        except OSError as e:
            raise ConfigurationError(f"Error reading config file {path}: {str(e)}")
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config file {path} must contain a mapping")
        return data

    def load_raw(self) -> Dict[str, Any]:
        """Load the defaults merged with the optional override file.

        Returns:
            Nested dictionary of configuration values
        """
        data = self._read_yaml(self.defaults_path)
        if self.config_path is not None:
            data = _merge(data, self._read_yaml(self.config_path))
        return data

    def load_config(self) -> AppConfig:
        """Load and validate the full configuration.

        Returns:
            AppConfig object with all configuration

        Raises:
            ConfigurationError: If any value is missing or out of range
        """
        data = self.load_raw()

        try:
            codec_data = data.get('codec', {})
            codec = CodecDefaults(
                exhaustive_m_limit=int(codec_data.get('exhaustive_m_limit', 64))
            )
            if codec.exhaustive_m_limit < 2:
                raise ConfigurationError("codec.exhaustive_m_limit must be at least 2")
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid codec configuration: {str(e)}")

        try:
            lab_data = data.get('lab', {})
            lab = LabConfig(
                trials=int(lab_data.get('trials', 30)),
                seed=int(lab_data.get('seed', 0)),
                table_cap=int(lab_data.get('table_cap', 65536)),
                max_symbol_bits=int(lab_data.get('max_symbol_bits', 64)),
                series_head=int(lab_data.get('series_head', 4096))
            )
            if lab.trials < 1:
                raise ConfigurationError("lab.trials must be at least 1")
            if lab.seed < 0 or lab.seed >= 2 ** 64:
                raise ConfigurationError("lab.seed must be a 64-bit non-negative integer")
            if lab.table_cap < 16:
                raise ConfigurationError("lab.table_cap must be at least 16")
            if not 8 <= lab.max_symbol_bits <= 4096:
                raise ConfigurationError("lab.max_symbol_bits must be between 8 and 4096")
            if lab.series_head < 16:
                raise ConfigurationError("lab.series_head must be at least 16")
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid lab configuration: {str(e)}")

        try:
            bounds_data = data.get('bounds', {})
            bounds = BoundsConfig(
                eps=float(bounds_data.get('eps', 0.1)),
                grid_step=float(bounds_data.get('grid_step', 0.01)),
                nml_budget=int(bounds_data.get('nml_budget', 10_000_000))
            )
            if not 0 < bounds.eps < 1:
                raise ConfigurationError("bounds.eps must lie strictly between 0 and 1")
            if not 0 < bounds.grid_step <= 0.1:
                raise ConfigurationError("bounds.grid_step must be in (0, 0.1]")
            if bounds.nml_budget < 1:
                raise ConfigurationError("bounds.nml_budget must be positive")
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid bounds configuration: {str(e)}")

        level = str(data.get('logging', {}).get('level', 'INFO')).upper()
        if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ConfigurationError(f"Invalid logging level: {level}")

        return AppConfig(
            codec=codec,
            lab=lab,
            bounds=bounds,
            logging=LoggingConfig(level=level)
        )


_cached: Optional[AppConfig] = None


def get_config(reload: bool = False) -> AppConfig:
    """Return the process-wide configuration, honouring MONOCODE_CONFIG.

    Args:
        reload: Re-read the files instead of returning the cached copy

    Returns:
        AppConfig object
    """
    global _cached
    if _cached is None or reload:
        from .env import EnvLoader
        override = EnvLoader().config_path()
        _cached = ConfigLoader(config_path=override).load_config()
    return _cached
