"""
Run configuration files and command-line overrides.

A config file holds flat `key=value` lines with dotted namespaces
(`ppo.gamma=0.99`); `#` comments and blank lines are allowed. It is read
with python-dotenv, overrides from repeated `--set key=value` flags are
laid on top, and the merged mapping is validated by TrainConfigSerializer.
"""

# 1. Standard library
from pathlib import Path

# 2. Third-party
from dotenv import dotenv_values

# 3. Local imports
from app_ppo.api.serializers import build_train_config

from .exceptions import ConfigFileError


def read_config_file(path):
    """
    Raises:
        ConfigFileError: the file is missing or has a line without a value.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigFileError(f'config file {path} does not exist')
    values = dotenv_values(path, interpolate=False)
    bare = [key for key, value in values.items() if value is None]
    if bare:
        raise ConfigFileError(f'{path}: keys without a value: {", ".join(bare)}')
    return dict(values)


def parse_overrides(items):
    """['ppo.lr=1e-3', ...] -> {'ppo.lr': '1e-3', ...}; later items win."""
    overrides = {}
    for item in items or ():
        key, sep, value = item.partition('=')
        if not sep or not key.strip():
            raise ConfigFileError(f'override {item!r} is not of the form key=value')
        overrides[key.strip()] = value.strip()
    return overrides


def load_train_config(path=None, overrides=None):
    """
    Build the validated TrainConfig for a command invocation.

    Raises:
        ConfigFileError: unreadable file or malformed override.
        serializers.ValidationError: the merged mapping does not validate.
    """
    flat = read_config_file(path) if path else {}
    flat.update(parse_overrides(overrides))
    return build_train_config(flat)
