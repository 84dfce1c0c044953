"""Tests for env module."""
import pytest

from src.utils.env import CONFIG_VAR, LOG_LEVEL_VAR, EnvLoader
from src.utils.exceptions import ConfigurationError


def test_load_env_file_exists(temp_env_file, clean_env):
    """Test loading existing .env file."""
    loader = EnvLoader(env_path=str(temp_env_file))
    assert loader.get('MONOCODE_TEST_ONLY') == 'present'
    assert loader.log_level() == 'DEBUG'


def test_load_env_file_missing(tmp_path, clean_env):
    """Test loading missing .env file."""
    loader = EnvLoader(env_path=str(tmp_path / "nonexistent.env"))
    assert loader.get('MONOCODE_NONEXISTENT_KEY') is None


def test_get_missing_key_with_default(tmp_path, clean_env):
    """Test getting missing key with default."""
    loader = EnvLoader(env_path=str(tmp_path / "nonexistent.env"))
    assert loader.get('MONOCODE_NONEXISTENT_KEY', 'default') == 'default'


def test_environment_wins_over_env_file(temp_env_file, clean_env):
    """Test variables already in the environment are not overridden."""
    clean_env.setenv(LOG_LEVEL_VAR, 'warning')
    loader = EnvLoader(env_path=str(temp_env_file))
    assert loader.log_level() == 'WARNING'


def test_log_level_unset(tmp_path, clean_env):
    """Test no level without MONOCODE_LOG_LEVEL."""
    assert EnvLoader(env_path=str(tmp_path / "nonexistent.env")).log_level() is None


def test_config_path(temp_config_file, tmp_path, clean_env):
    """Test MONOCODE_CONFIG resolves to an existing file."""
    clean_env.setenv(CONFIG_VAR, str(temp_config_file))
    assert EnvLoader(env_path=str(tmp_path / "none.env")).config_path() == temp_config_file


def test_config_path_missing_file(tmp_path, clean_env):
    """Test MONOCODE_CONFIG naming a missing file is rejected."""
    clean_env.setenv(CONFIG_VAR, str(tmp_path / "absent.yaml"))
    with pytest.raises(ConfigurationError):
        EnvLoader(env_path=str(tmp_path / "none.env")).config_path()


def test_config_path_unset(tmp_path, clean_env):
    """Test no override path without MONOCODE_CONFIG."""
    assert EnvLoader(env_path=str(tmp_path / "none.env")).config_path() is None
