"""Pytest configuration and fixtures."""
import numpy as np
import pytest
import yaml

from src.utils import config_loader
from tests.fixtures.sample_data import SAMPLE_CONFIG_DATA


@pytest.fixture
def temp_config_file(tmp_path):
    """Create a temporary override config file."""
    config_path = tmp_path / "monocode.yaml"
    with open(config_path, 'w') as f:
        yaml.dump(SAMPLE_CONFIG_DATA, f)
    return config_path


@pytest.fixture
def temp_env_file(tmp_path):
    """Create a temporary .env file."""
    env_path = tmp_path / ".env"
    env_path.write_text("MONOCODE_LOG_LEVEL=debug\nMONOCODE_TEST_ONLY=present\n")
    return env_path


@pytest.fixture
def lab_config(temp_config_file, monkeypatch):
    """Use the small test configuration for everything that calls get_config()."""
    monkeypatch.setenv('MONOCODE_CONFIG', str(temp_config_file))
    config = config_loader.get_config(reload=True)
    yield config
    monkeypatch.delenv('MONOCODE_CONFIG', raising=False)
    config_loader.get_config(reload=True)


@pytest.fixture
def rng():
    """Deterministic random generator for fuzzed inputs."""
    return np.random.default_rng(20240601)


@pytest.fixture
def geometric_sequence(rng):
    """A geometric(0.5) sample of length 512."""
    return [int(v) for v in rng.geometric(0.5, size=512)]


@pytest.fixture
def heavy_tail_sequence(rng):
    """A Zipf(2) sample of length 512 with a long tail."""
    return [int(v) for v in rng.zipf(2.0, size=512)]


@pytest.fixture
def clean_env(monkeypatch):
    """Unset the MONOCODE_* variables a .env file may set; teardown removes them again."""
    for name in ('MONOCODE_LOG_LEVEL', 'MONOCODE_TEST_ONLY', 'MONOCODE_CONFIG'):
        monkeypatch.setenv(name, 'unset')
        monkeypatch.delenv(name)
    return monkeypatch
