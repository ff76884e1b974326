import os
import logging
from pathlib import Path
from dotenv import load_dotenv

from hotspot.exceptions import ConfigError

# Load environment variables
load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{name} must be a number, got {raw!r}", paths=[name])


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}", paths=[name])


class Config:
    """Base configuration."""
    DEBUG = False
    TESTING = False
    CONFIG_DIR = Path(__file__).resolve().parent / "configs"

    def __init__(self):
        self.THREADS = max(1, _env_int("HOTSPOT_THREADS", os.cpu_count() or 1))
        self.LOG_LEVEL = os.getenv("HOTSPOT_LOG_LEVEL", "INFO").upper()
        if not isinstance(logging.getLevelName(self.LOG_LEVEL), int):
            raise ConfigError(f"Unknown log level {self.LOG_LEVEL!r}", paths=["HOTSPOT_LOG_LEVEL"])
        self.DEFAULT_H = _env_float("HOTSPOT_DEFAULT_H", 1.0 / 128.0)
        self.DEFAULT_TOLERANCE = _env_float("HOTSPOT_TOLERANCE", 0.02)
        self.HEAT_DT_MAX = _env_float("HOTSPOT_HEAT_DT_MAX", 0.01)
        if self.DEFAULT_H <= 0 or self.HEAT_DT_MAX <= 0:
            raise ConfigError("Grid spacing and time step must be positive",
                              paths=["HOTSPOT_DEFAULT_H", "HOTSPOT_HEAT_DT_MAX"])
        if not 0 <= self.DEFAULT_TOLERANCE < 1:
            raise ConfigError("Tolerance must lie in [0, 1)", paths=["HOTSPOT_TOLERANCE"])


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True
    TESTING = False


class TestingConfig(Config):
    """Testing configuration."""
    DEBUG = False
    TESTING = True

    def __init__(self):
        super().__init__()
        # Deterministic scheduling in tests
        self.THREADS = 1
        self.DEFAULT_H = _env_float("HOTSPOT_DEFAULT_H", 1.0 / 32.0)


class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False
    TESTING = False


# Dictionary with different configuration environments
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': DevelopmentConfig
}


def get_config() -> Config:
    """Return the configuration object for the current HOTSPOT_ENV."""
    env = os.getenv('HOTSPOT_ENV', 'default')
    return config.get(env, config['default'])()
