# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Common utilities shared by the population control library.

This module provides:
- The exception hierarchy used across the library and the CLI.
- `Settings`: an accessor for budgets, caps and simulation defaults loaded
  from `configs/defaults.yaml`, optionally overlaid by a user file.
- `Budget`: a small counter raising `BudgetExceededError` once a
  configured limit is crossed.
- `open_yaml` for loading YAML files.
"""

from functools import lru_cache
from pathlib import Path
from typing import Optional
import yaml
from packaging.version import Version


SUPPORTED_SCHEMA = Version("1.0")


class ConfigNotSupportedError(Exception):
    """Exception raised when a configuration file is missing or unsupported."""


class InputError(ValueError):
    """Exception raised for malformed input files.

    Attributes:
        line (int | None): 1-based line number of the offending input line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceededError(Exception):
    """Exception raised when a configurable resource cap is hit.

    The computation stopped without an answer. `partial` holds whatever
    intermediate result the raising operation could offer (or None).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InvariantError(AssertionError):
    """Exception raised when an internal consistency check fails."""


class Settings:
    """
    Accessor for library budgets and defaults.

    Loads `configs/defaults.yaml` shipped with the package and overlays the
    sections of an optional user configuration file on top of it.

    Attributes:
        data (dict): Merged configuration.
    """

    def __init__(self, config_file=None):
        """
        Initialize a settings object.

        Args:
            config_file (Path or str): Optional path to a custom config file.
                                       Only the keys it names are overridden.
        """
        script = Path(__file__).parent.parent.resolve()
        try:
            self.data = open_yaml(script / "configs/defaults.yaml")
            if config_file is not None:
                custom = open_yaml(config_file) or {}
                for section, values in custom.items():
                    if isinstance(values, dict):
                        self.data.setdefault(section, {}).update(values)
                    else:
                        self.data[section] = values
        except FileNotFoundError as e:
            raise ConfigNotSupportedError(f"Configuration not found {e.filename}") from e
        except yaml.YAMLError as e:
            raise ConfigNotSupportedError(f"Configuration is not valid YAML: {e}") from e
        if self.get_schema_version() > SUPPORTED_SCHEMA:
            raise ConfigNotSupportedError(
                f"Configuration schema {self.get_schema_version()} is newer than "
                f"the supported schema {SUPPORTED_SCHEMA}")

    def get_schema_version(self):
        """
        Get the schema version of the configuration.

        Returns:
            Version: Schema version parsed as a `packaging.version.Version`.
        """
        return Version(str(self.data.get('schema', '1.0')))

    def get_limit(self, name: str):
        """
        Get a resource limit.

        Args:
            name (str): Limit name, e.g. "oracle_configurations".

        Returns:
            int | None: The configured limit. None means "derived from the input".

        Raises:
            ConfigNotSupportedError: If the limit is not known.
        """
        try:
            value = self.data['limits'][name]
        except KeyError as e:
            raise ConfigNotSupportedError(f"Unknown limit {name}") from e
        return None if value is None else int(value)

    def get_limits(self) -> dict:
        """
        Get all resource limits.

        Returns:
            dict: Mapping of limit name to value.
        """
        return dict(self.data['limits'])

    def get_simulation(self, name: str) -> int:
        """
        Get a simulation default (runs, max_steps or seed).

        Args:
            name (str): Setting name.

        Returns:
            int: The configured value.
        """
        return int(self.data['simulation'][name])


@lru_cache(maxsize=1)
def default_settings():
    """Settings loaded from the shipped defaults only."""
    return Settings()


_ACTIVE: list = []


def activate(settings: Optional[Settings]):
    """Use `settings` for every limit a caller leaves unset, None restores the defaults."""
    _ACTIVE[:] = [] if settings is None else [settings]


def active_settings() -> Settings:
    """The activated settings, or the shipped defaults."""
    return _ACTIVE[0] if _ACTIVE else default_settings()


def resolve_limit(value, name: str):
    """
    Return `value` unless it is None, else the default limit `name`.

    Args:
        value (int | None): Explicit limit passed by the caller.
        name (str): Limit name in the settings file.

    Returns:
        int | None: Effective limit.
    """
    if value is not None:
        return value
    return active_settings().get_limit(name)


class Budget:
    """Counts units of work and fails once a limit is crossed.

    Attributes:
        name (str): Name used in the failure message.
        limit (int | None): Maximum number of units, None for unlimited.
        used (int): Units charged so far.
    """

    def __init__(self, name: str, limit):
        self.name = name
        self.limit = limit
        self.used = 0

    def charge(self, units: int = 1, partial=None):
        """
        Charge `units` and raise if the limit is exceeded.

        Raises:
            BudgetExceededError: When `used` grows past `limit`.
        """
        self.used += units
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceededError(f"budget exhausted: {self.name} > {self.limit}",
                                      partial=partial)


def open_yaml(yamlfile: Path):
    """
    Load the contents of a YAML file.

    Args:
        yamlfile (Path): Path to the YAML file.

    Returns:
        dict | None: Parsed YAML content, None for an empty file.
    """
    content = Path(yamlfile).read_text(encoding='utf-8')
    return yaml.safe_load(content)
