from __future__ import annotations

from pathlib import Path

import pytest

from pylightlike import paths


def test_user_dirs_are_absolute(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("XDG_CONFIG_HOME", raising=False)
    monkeypatch.delenv("LIGHTLIKE_APP_NAME", raising=False)
    assert paths.user_config_dir().is_absolute()
    assert paths.user_cache_dir().is_absolute()
    assert paths.user_settings_file().name == paths.SETTINGS_FILENAME


def test_xdg_config_home(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path))
    monkeypatch.delenv("LIGHTLIKE_APP_NAME", raising=False)
    assert paths.user_config_dir() == (tmp_path / "pylightlike").resolve()
    assert paths.user_settings_file() == (tmp_path / "pylightlike" / "settings.ini").resolve()


def test_app_name_override(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path))
    monkeypatch.setenv("LIGHTLIKE_APP_NAME", "lightlike-dev")
    assert paths.user_config_dir().name == "lightlike-dev"


def test_package_data() -> None:
    assert paths.core_defaults_file().is_file()
    names = {p.name for p in paths.fixture_data_dir().glob("*.toml")}
    assert {"ctrl_sasaki.toml", "ex3_graph.toml", "hyp_x1y2.toml"} <= names
