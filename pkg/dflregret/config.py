import copy
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

import dflregret.default_config as default_config
from dflregret.errors import SchemaError

# Use default config but allow it to be overridden
_config: Optional[Dict] = None


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Merge override into a copy of base, recursing into nested dicts."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def initialize_config():
    """Initialize the configuration with default values."""
    global _config
    if _config is None:
        _config = copy.deepcopy(default_config.DEFAULT_CONFIG)


def set_config(config: Dict):
    """Update the configuration with custom values (nested keys are merged)."""
    global _config
    if _config is None:
        initialize_config()
    _config = _deep_merge(_config, config)


def reset_config():
    """Drop all overrides and go back to the defaults."""
    global _config
    _config = None
    initialize_config()


def get_config() -> Dict:
    """Get the current configuration."""
    if _config is None:
        initialize_config()
    return copy.deepcopy(_config)


def load_settings(path: Path) -> Dict[str, Any]:
    """Read a YAML settings file into a dict.

    Args:
        path: Path to a YAML document whose top level is a mapping

    Returns:
        The parsed mapping (empty dict for an empty file)
    """
    with open(path) as f:
        data = yaml.safe_load(f)

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise SchemaError(f"Settings file {path} must contain a mapping, got {type(data).__name__}")
    return data


def env_overrides() -> Dict[str, Any]:
    """Collect overrides from DFLREGRET_* environment variables."""
    overrides: Dict[str, Any] = {}
    if os.getenv("DFLREGRET_LOG_LEVEL"):
        overrides["logging"] = {"level": os.environ["DFLREGRET_LOG_LEVEL"]}
    if os.getenv("DFLREGRET_RESULTS_DIR"):
        overrides["results_dir"] = os.environ["DFLREGRET_RESULTS_DIR"]
    if os.getenv("DFLREGRET_DATA_DIR"):
        overrides["data_dir"] = os.environ["DFLREGRET_DATA_DIR"]
    return overrides


def load_layered_config(
    settings_path: Optional[Path] = None,
    extra_path: Optional[Path] = None,
) -> Dict[str, Any]:
    """Build the effective configuration: defaults < settings.yaml < env < extra file.

    Flags are applied afterwards by the caller via set_config.
    """
    reset_config()
    if settings_path is not None and Path(settings_path).exists():
        set_config(load_settings(Path(settings_path)))
    set_config(env_overrides())
    if extra_path is not None:
        set_config(load_settings(Path(extra_path)))
    return get_config()


# Initialize with default config
initialize_config()
