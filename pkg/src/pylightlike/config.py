"""Layered settings: bundled defaults, user file, ``--config``, environment, flags."""

from __future__ import annotations

import configparser
import io
import json
import logging
import os
from collections.abc import Mapping, MutableMapping
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .paths import core_defaults_file, user_settings_file

logger = logging.getLogger(__name__)

__all__ = [
    "ENV_PREFIX",
    "FORMATS",
    "Settings",
    "load_settings",
    "read_env",
    "read_sections",
]

ENV_PREFIX = "LIGHTLIKE_"
FORMATS = ("text", "json")

Sections = dict[str, dict[str, str]]


def read_sections(path: Path) -> Sections:
    """All sections of an INI file; raise ``configparser.Error`` or ``OSError``."""
    parser = configparser.ConfigParser(strict=False)
    with path.open(encoding="utf-8") as fh:
        parser.read_file(fh)
    return {section: dict(parser.items(section)) for section in parser.sections()}


def read_env(sections: Mapping[str, object], environ: Mapping[str, str] | None = None) -> Sections:
    """``LIGHTLIKE_<SECTION>_<KEY>`` variables for the known *sections*."""
    env = os.environ if environ is None else environ
    result: Sections = {}
    for name, value in env.items():
        if not name.startswith(ENV_PREFIX):
            continue
        section, _, key = name[len(ENV_PREFIX) :].lower().partition("_")
        if section not in sections or not key:
            continue
        result.setdefault(section, {})[key] = value
    return result


@dataclass
class Settings:
    """Merged settings plus the list of layers they came from."""

    values: Sections = field(default_factory=dict)
    layers: list[str] = field(default_factory=list)

    def apply(self, source: str, sections: Mapping[str, Mapping[str, object]]) -> None:
        changed = False
        for section, items in sections.items():
            for key, value in items.items():
                if value is None:
                    continue
                self.values.setdefault(section, {})[key] = str(value)
                changed = True
        if changed:
            self.layers.append(source)

    def get(self, section: str, key: str) -> str:
        try:
            return self.values[section][key]
        except KeyError:
            raise ConfigurationError(f"missing setting [{section}] {key}") from None

    def get_int(self, section: str, key: str) -> int:
        raw = self.get(section, key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"[{section}] {key} must be an integer, got {raw!r}") from None

    def get_float(self, section: str, key: str) -> float:
        raw = self.get(section, key)
        try:
            return float(raw)
        except ValueError:
            raise ConfigurationError(f"[{section}] {key} must be a number, got {raw!r}") from None

    def get_choice(self, section: str, key: str, choices: tuple[str, ...]) -> str:
        raw = self.get(section, key)
        if raw not in choices:
            raise ConfigurationError(
                f"[{section}] {key} must be one of {', '.join(choices)}, got {raw!r}"
            )
        return raw

    def run_values(self) -> dict[str, float | int]:
        """Keyword arguments for :class:`pylightlike.suites.RunSettings`."""
        return {
            "points": self.get_int("run", "points"),
            "tol": self.get_float("run", "tol"),
            "seed": self.get_int("run", "seed"),
            "degeneracy": self.get_float("numerics", "degeneracy"),
            "random_fields": self.get_int("numerics", "random_fields"),
            "max_rejections": self.get_int("numerics", "max_rejections"),
        }

    @property
    def report_format(self) -> str:
        return self.get_choice("run", "format", FORMATS)

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        for section in sorted(self.values):
            parser[section] = dict(sorted(self.values[section].items()))
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"layers": self.layers, "settings": self.values}, indent=2, sort_keys=True) + "\n"


def _read_optional(path: Path, acc: Settings, source: str) -> None:
    if not path.is_file():
        return
    try:
        acc.apply(source, read_sections(path))
    except (OSError, configparser.Error) as exc:
        logger.warning("Failed to read config %s: %s", path, exc)


def load_settings(
    config_file: Path | None = None,
    *,
    user_file: Path | None = None,
    environ: Mapping[str, str] | None = None,
    overrides: Mapping[str, Mapping[str, object]] | None = None,
) -> Settings:
    """Merge every layer, lowest precedence first."""
    acc = Settings()
    defaults = core_defaults_file()
    try:
        acc.apply(f"defaults:{defaults}", read_sections(defaults))
    except (OSError, configparser.Error) as exc:
        raise ConfigurationError(f"bundled defaults unreadable: {exc}") from exc
    user = user_file if user_file is not None else user_settings_file()
    _read_optional(user, acc, f"user:{user}")
    if config_file is not None:
        path = Path(config_file).expanduser()
        try:
            acc.apply(f"config:{path}", read_sections(path))
        except (OSError, configparser.Error) as exc:
            raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    env: MutableMapping[str, dict[str, str]] = read_env(acc.values, environ)
    acc.apply("environment", env)
    if overrides:
        acc.apply("command line", overrides)
    logger.debug("settings layers: %s", ", ".join(acc.layers))
    return acc
