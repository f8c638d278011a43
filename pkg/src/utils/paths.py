"""
Platform-specific path utilities for Flatband Studio.
Bundled defaults live next to the sources; user overrides live in the
per-user data directory so they survive reinstalls.
"""

import os
import platform
from pathlib import Path
from typing import Optional

# Explicit config file, takes the place of the user override layer.
CONFIG_ENV_VAR = "FLATBAND_STUDIO_CONFIG"


def get_user_data_dir() -> str:
    """
    Get the platform-specific user data directory for Flatband Studio.

    Returns:
        Path to user data directory (e.g., ~/.local/share/FlatbandStudio on Linux)
    """
    system = platform.system()

    if system == "Darwin":  # macOS
        base = Path.home() / "Library" / "Application Support"
    elif system == "Windows":
        base = Path(os.environ.get("APPDATA", Path.home() / "AppData" / "Roaming"))
    else:  # Linux and others
        base = Path.home() / ".local" / "share"

    app_data_dir = base / "FlatbandStudio"
    app_data_dir.mkdir(parents=True, exist_ok=True)
    return str(app_data_dir)


def _bundled_resource_dir() -> str:
    """Repo root, which holds the read-only config/ shipped with the sources."""
    return os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


def get_config_dir() -> str:
    """Directory holding the bundled settings.json (read-only defaults)."""
    return os.path.join(_bundled_resource_dir(), "config")


def get_user_config_dir() -> str:
    """
    Get directory for user-modified config files.

    Returns:
        Path to user config directory
    """
    user_config = os.path.join(get_user_data_dir(), "config")
    os.makedirs(user_config, exist_ok=True)
    return user_config


def get_env_config_path() -> Optional[str]:
    """Config path named by FLATBAND_STUDIO_CONFIG, or None when unset/empty."""
    value = os.environ.get(CONFIG_ENV_VAR, "").strip()
    return value or None
