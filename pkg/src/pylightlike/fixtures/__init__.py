"""Registry of bundled fixtures and the loader for fixture files.

Bundled fixtures are the ``data/*.toml`` resources of this package; any other
``.toml`` path can be loaded too.  Loading resolves ``base`` links, builds
every declared object and runs the bootstrap validation.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from importlib import resources
from pathlib import Path
from typing import Any

from ..connection import DEFAULT_DEGENERACY
from ..errors import FixtureSchemaError, UnknownFixtureError
from .format import (
    BOOTSTRAP_POINTS,
    FORMAT_VERSION,
    Fixture,
    bootstrap,
    build_fixture,
    merge_documents,
    normalize,
    read_document,
    resolve_document,
    serialize,
)

logger = logging.getLogger(__name__)

__all__ = [
    "FORMAT_VERSION",
    "Fixture",
    "available",
    "bootstrap",
    "build_fixture",
    "load_document",
    "load_fixture",
    "merge_documents",
    "normalize",
    "read_document",
    "resolve_document",
    "serialize",
]

_DATA = "data"
_SUFFIX = ".toml"


def _data_dir() -> Any:
    return resources.files(__package__) / _DATA


def available() -> list[str]:
    """Sorted names of the bundled fixtures."""
    return sorted(
        entry.name[: -len(_SUFFIX)]
        for entry in _data_dir().iterdir()
        if entry.name.endswith(_SUFFIX)
    )


def _is_path(ref: str | Path) -> bool:
    return isinstance(ref, Path) or str(ref).endswith(_SUFFIX)


def _read(ref: str | Path, relative_to: Path | None = None) -> tuple[dict[str, Any], str, Path | None]:
    """Raw document, its origin text and the directory relative paths resolve against."""
    if _is_path(ref):
        path = Path(ref).expanduser()
        if not path.is_absolute() and relative_to is not None:
            path = relative_to / path
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise FixtureSchemaError(f"cannot read fixture file {path}: {exc}") from exc
        return read_document(text, str(path)), str(path), path.parent
    name = str(ref)
    names = available()
    if name not in names:
        raise UnknownFixtureError(name, names)
    text = (_data_dir() / f"{name}{_SUFFIX}").read_text(encoding="utf-8")
    return read_document(text, name), name, None


def load_document(ref: str | Path) -> tuple[dict[str, Any], str]:
    """The merged document for a fixture name or path, with ``base`` resolved."""
    doc, origin, folder = _read(ref)
    return _resolved(doc, folder, (origin,)), origin


def _resolved(doc: Mapping[str, Any], folder: Path | None, seen: tuple[str, ...]) -> dict[str, Any]:
    # each base path is relative to the file that names it
    def lookup(base: str) -> Mapping[str, Any]:
        parent, _, parent_folder = _read(base, folder)
        return _resolved(parent, parent_folder, seen + (base,))

    return resolve_document(doc, lookup, seen)


def load_fixture(
    ref: str | Path,
    *,
    parameters: Mapping[str, float] | None = None,
    bootstrap_points: int = BOOTSTRAP_POINTS,
    degeneracy: float = DEFAULT_DEGENERACY,
    max_rejections: int = 100_000,
) -> Fixture:
    """Load, build and validate a fixture by registry name or ``.toml`` path."""
    doc, origin = load_document(ref)
    fixture = build_fixture(doc, parameters=parameters, source=origin)
    bootstrap(
        fixture,
        points=bootstrap_points,
        degeneracy=degeneracy,
        max_rejections=max_rejections,
    )
    logger.info("loaded fixture %s from %s", fixture.name, origin)
    return fixture
