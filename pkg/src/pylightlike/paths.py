from __future__ import annotations

import os
from importlib import resources as ilr
from pathlib import Path

from platformdirs import user_cache_dir as _ucache, user_config_dir as _uc

APP_NAME = "pylightlike"
SETTINGS_FILENAME = "settings.ini"

# ---------------------------------------------------------------------------
# User directories
# ---------------------------------------------------------------------------


def _app_name(default: str) -> str:
    return os.getenv("LIGHTLIKE_APP_NAME", default)


def user_config_dir(app_name: str = APP_NAME) -> Path:
    app = _app_name(app_name)
    override = os.getenv("XDG_CONFIG_HOME")
    if override:
        return (Path(override).expanduser() / app).resolve()
    return Path(_uc(appname=app)).resolve()


def user_cache_dir(app_name: str = APP_NAME) -> Path:
    return Path(_ucache(appname=_app_name(app_name))).resolve()


def user_settings_file(app_name: str = APP_NAME) -> Path:
    """The user-level settings file; it need not exist."""
    return user_config_dir(app_name) / SETTINGS_FILENAME


# ---------------------------------------------------------------------------
# Package-installed data
# ---------------------------------------------------------------------------


def package_resource_dir() -> Path:
    return Path(str(ilr.files("pylightlike") / "resources"))


def core_defaults_file() -> Path:
    return package_resource_dir() / "core_defaults.ini"


def fixture_data_dir() -> Path:
    return Path(str(ilr.files("pylightlike.fixtures") / "data"))
