"""Configuration management for pindex.

This module handles loading, saving, and accessing configuration settings.
Numerical tolerances, search parameters and report options all live here so
that every run can echo the effective values it used.
"""

import json
import logging
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

# Configure logging
logger = logging.getLogger(__name__)

# Default configuration values
DEFAULT_CONFIG: dict[str, Any] = {
    # Structure and rank tolerances
    "tol_sp": 1e-9,
    "tol_rank": 1e-8,
    "tol_circle": 1e-7,
    "tol_cluster": 1e-6,
    "tol_sym": 1e-9,
    "tol_root": 1e-10,
    "tol_integer": 1e-9,
    "tol_null": 1e-6,
    "tol_dedup": 1e-4,
    # Path sampling
    "step_bound": 0.05,
    "min_steps": 64,
    # Orbit search
    "alpha": 1.5,
    "restarts": 6,
    "seed": 0,
    "modes": 16,
    "max_iterations": 400,
    "grad_tol": 1e-9,
    # Refinement schedules (comma separated)
    "mode_schedule": "64,96,128",
    "epsilon_schedule": "1e-2,1e-3,1e-4",
    "perturbation_schedule": "1e-3,1e-4,1e-5",
    # Reports
    "reproducible": False,
    "significant_digits": 17,
}

# Config keys that should be type-checked
CONFIG_TYPES: dict[str, type] = {
    "tol_sp": float,
    "tol_rank": float,
    "tol_circle": float,
    "tol_cluster": float,
    "tol_sym": float,
    "tol_root": float,
    "tol_integer": float,
    "tol_null": float,
    "tol_dedup": float,
    "step_bound": float,
    "min_steps": int,
    "alpha": float,
    "restarts": int,
    "seed": int,
    "modes": int,
    "max_iterations": int,
    "grad_tol": float,
    "mode_schedule": str,
    "epsilon_schedule": str,
    "perturbation_schedule": str,
    "reproducible": bool,
    "significant_digits": int,
}


def get_config_dir() -> Path:
    """Get the configuration directory path.

    The ``PINDEX_CONFIG_DIR`` environment variable takes precedence; a source
    checkout uses the package directory; otherwise ``~/.config/pindex``.

    Returns:
        Path: The path to the configuration directory
    """
    override = os.environ.get("PINDEX_CONFIG_DIR")
    if override:
        config_dir = Path(override)
        logger.debug(f"Using config directory from environment: {config_dir}")
        return config_dir

    # Check if running in development mode
    manifest_path = Path(__file__).parent.parent / "pyproject.toml"

    if manifest_path.exists():
        # Development mode - use local config
        config_dir = Path(__file__).parent
        logger.debug(f"Using development mode config directory: {config_dir}")
    else:
        config_dir = Path.home() / ".config" / "pindex"
        os.makedirs(config_dir, exist_ok=True)
        logger.debug(f"Using user mode config directory: {config_dir}")

    return config_dir


def get_config_file_path() -> Path:
    """Get the path to the config file.

    Returns:
        Path: The path to the config file
    """
    return get_config_dir() / "config.json"


def coerce_value(key: str, value: Any) -> Any:
    """Convert a raw value to the type declared for its key.

    Args:
        key: The configuration key
        value: The raw value (from JSON or the command line)

    Returns:
        The converted value

    Raises:
        ValueError: If the value cannot be converted or a tolerance is not positive
    """
    if key not in CONFIG_TYPES:
        return value
    expected_type = CONFIG_TYPES[key]
    if issubclass(expected_type, bool) and isinstance(value, str):
        return value.lower() in ("true", "yes", "y", "1")
    try:
        converted = expected_type(value)
    except (ValueError, TypeError):
        raise ValueError(
            f"Invalid type for config key '{key}': "
            f"expected {expected_type.__name__}, got {type(value).__name__}",
        ) from None
    if key.startswith("tol_") and converted <= 0:
        raise ValueError(f"Tolerance '{key}' must be positive, got {converted}")
    return converted


def load_config() -> dict[str, Any]:
    """Load configuration from file or use defaults.

    Returns:
        Dict[str, Any]: The configuration dictionary with all required keys
    """
    config_file = get_config_file_path()

    # Start with default config
    config = DEFAULT_CONFIG.copy()

    if config_file.exists():
        try:
            with open(config_file, encoding="utf-8") as f:
                user_config = json.load(f)

            for key, value in user_config.items():
                if key in CONFIG_TYPES:
                    try:
                        config[key] = coerce_value(key, value)
                    except ValueError as e:
                        logger.warning(str(e))
                else:
                    logger.debug(f"Unknown config key: {key}")
                    config[key] = value

            logger.debug("Configuration loaded successfully")
        except json.JSONDecodeError:
            logger.warning(
                f"Invalid JSON in config file at {config_file}. Using defaults.",
            )
        except OSError as e:
            logger.warning(f"Error loading config: {str(e)}. Using defaults.")
    else:
        logger.debug("No config file found. Using defaults.")

    return config


def save_config(config: dict[str, Any]) -> None:
    """Save configuration to file.

    Args:
        config: The configuration dictionary to save
    """
    config_file = get_config_file_path()

    try:
        config_file.parent.mkdir(parents=True, exist_ok=True)

        with open(config_file, "w", encoding="utf-8") as f:
            json.dump(config, f, indent=2)

        logger.info(f"Configuration saved to {config_file}")
    except OSError as e:
        logger.error(f"Error saving config to {config_file}: {str(e)}")
        raise


def parse_schedule(text: str, kind: type = float) -> list[Any]:
    """Parse a comma separated schedule such as ``"1e-2,1e-3,1e-4"``.

    Args:
        text: The schedule string
        kind: Element type (float or int)

    Returns:
        The parsed list, in the given order
    """
    return [kind(item) for item in str(text).split(",") if item.strip()]


class ConfigManager:
    """Singleton manager for configuration settings."""

    _instance = None
    _config: dict[str, Any] | None = None

    @classmethod
    def get_instance(cls) -> "ConfigManager":
        """Get the singleton instance."""
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance

    def __init__(self) -> None:
        """Initialize the configuration manager."""
        # Only load config once
        if ConfigManager._config is None:
            ConfigManager._config = load_config()

    def get_config(self) -> dict[str, Any]:
        """Get the complete configuration dictionary."""
        if ConfigManager._config is None:
            return {}
        return ConfigManager._config

    def get_value(self, key: str, default: Any = None) -> Any:
        """Get a specific configuration value."""
        if default is None:
            default = DEFAULT_CONFIG.get(key)
        if ConfigManager._config is None:
            return default
        value = ConfigManager._config.get(key, default)
        return default if value is None else value

    def set_value(self, key: str, value: Any, persist: bool = True) -> None:
        """Set a specific configuration value.

        Args:
            key: The configuration key
            value: The new value, converted to the declared type
            persist: Whether to write the configuration file

        Raises:
            ValueError: If the value has an invalid type for the key
        """
        value = coerce_value(key, value)

        if ConfigManager._config is None:
            ConfigManager._config = DEFAULT_CONFIG.copy()
        ConfigManager._config[key] = value
        if persist:
            save_config(ConfigManager._config)

        logger.debug(f"Config value updated: {key} = {value}")

    def override(self, values: dict[str, Any]) -> dict[str, Any]:
        """Apply in-memory overrides (command-line values) without saving.

        Args:
            values: Mapping of keys to values; None entries are ignored

        Returns:
            The effective configuration
        """
        for key, value in values.items():
            if value is not None:
                self.set_value(key, value, persist=False)
        return self.get_config()

    def reset(self) -> dict[str, bool | str]:
        """Reset the configuration to default values."""
        ConfigManager._config = DEFAULT_CONFIG.copy()
        save_config(ConfigManager._config)
        logger.info("Configuration reset to defaults")
        return {
            "success": True,
            "error": "",
        }


@dataclass(frozen=True)
class Tolerances:
    """Immutable snapshot of the numerical tolerances of a run."""

    tol_sp: float = DEFAULT_CONFIG["tol_sp"]
    tol_rank: float = DEFAULT_CONFIG["tol_rank"]
    tol_circle: float = DEFAULT_CONFIG["tol_circle"]
    tol_cluster: float = DEFAULT_CONFIG["tol_cluster"]
    tol_sym: float = DEFAULT_CONFIG["tol_sym"]
    tol_root: float = DEFAULT_CONFIG["tol_root"]
    tol_integer: float = DEFAULT_CONFIG["tol_integer"]
    tol_null: float = DEFAULT_CONFIG["tol_null"]
    tol_dedup: float = DEFAULT_CONFIG["tol_dedup"]
    step_bound: float = DEFAULT_CONFIG["step_bound"]
    min_steps: int = DEFAULT_CONFIG["min_steps"]

    @classmethod
    def from_config(cls, config: dict[str, Any] | None = None) -> "Tolerances":
        """Capture the tolerances from a configuration dictionary.

        Args:
            config: Configuration mapping; the managed configuration if None

        Returns:
            The frozen tolerance set
        """
        if config is None:
            config = ConfigManager.get_instance().get_config()
        values = {f.name: config.get(f.name, getattr(cls, f.name)) for f in fields(cls)}
        return cls(**values)


DEFAULT_TOLERANCES = Tolerances()


def get_config_value(key: str, default: Any = None) -> Any:
    """Get a specific configuration value.

    Args:
        key: The configuration key to retrieve
        default: The default value to return if the key is not found
                (if None, uses the value from DEFAULT_CONFIG)

    Returns:
        The value for the specified key
    """
    config_manager = ConfigManager.get_instance()
    return config_manager.get_value(key, default)


def set_config_value(key: str, value: Any) -> None:
    """Set a specific configuration value.

    Args:
        key: The configuration key to set
        value: The value to set

    Raises:
        ValueError: If the value has an invalid type for the key
    """
    config_manager = ConfigManager.get_instance()
    config_manager.set_value(key, value)


def reset_config() -> dict[str, bool | str]:
    """Reset the configuration to default values."""
    return ConfigManager.get_instance().reset()
