"""Fixture documents: TOML schema, ``base`` inheritance, building and bootstrap.

A fixture document is plain data; every coefficient is an expression string
in the language of :mod:`pylightlike.expr`.  See ``docs/fixture_format.md``
for the schema.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import tomlkit
from tomlkit.exceptions import TOMLKitError

from ..connection import (
    DEFAULT_DEGENERACY,
    ChristoffelConnection,
    Connection,
    DifferenceTensor,
    DualConnection,
    LeviCivita,
    ReflectedConnection,
    ShiftedConnection,
)
from ..contact import ContactStructure
from ..errors import BootstrapValidationError, ExprSyntaxError, FixtureSchemaError
from ..expr import Expr, constant, parse, pretty
from ..geometry import (
    Chart,
    Metric,
    OneForm,
    Tensor11Field,
    TensorField,
    VectorField,
    symmetry_defect,
)
from ..lightlike import Hypersurface, ScreenDecomposition, validate_hypersurface
from ..report import PASS, REPORT_ONLY, Expectations

logger = logging.getLogger(__name__)

__all__ = [
    "FORMAT_VERSION",
    "Fixture",
    "bootstrap",
    "build_fixture",
    "merge_documents",
    "normalize",
    "read_document",
    "resolve_document",
    "serialize",
]

FORMAT_VERSION = 1
CONNECTION_KINDS = ("levi-civita", "christoffel", "shifted")
DECLARED_DUALS = ("mean",)
BOOTSTRAP_POINTS = 20
BOOTSTRAP_SEED = 20240101
SYMMETRY_LIMIT = 1e-12

# serialization order of the top-level tables
_TABLES = ("parameters", "chart", "metric", "connection", "contact", "hypersurface", "expect")


@dataclass(frozen=True, eq=False)
class Fixture:
    """A fully built fixture: ambient structure plus optional hypersurface."""

    name: str
    description: str
    chart: Chart
    metric: Metric
    connection: Connection
    dual: Connection
    difference: DifferenceTensor | None = None
    declared_dual: Connection | None = None
    contact: ContactStructure | None = None
    hypersurface: Hypersurface | None = None
    screen: ScreenDecomposition | None = None
    expectations: Expectations = field(default_factory=Expectations)
    parameters: Mapping[str, float] = field(default_factory=dict)
    document: Mapping[str, Any] = field(default_factory=dict, repr=False)
    source: str = ""

    @property
    def has_hypersurface(self) -> bool:
        return self.hypersurface is not None and self.screen is not None

    @property
    def has_contact(self) -> bool:
        return self.contact is not None


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


def read_document(text: str, origin: str = "<string>") -> dict[str, Any]:
    try:
        doc = tomlkit.parse(text)
    except TOMLKitError as exc:
        raise FixtureSchemaError(f"{origin}: {exc}") from exc
    return doc.unwrap()


def merge_documents(base: Mapping[str, Any], child: Mapping[str, Any]) -> dict[str, Any]:
    """Deep merge of tables; the child wins, arrays are replaced whole."""
    merged: dict[str, Any] = dict(base)
    for key, value in child.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = merge_documents(merged[key], value)
        else:
            merged[key] = value
    return merged


def resolve_document(
    doc: Mapping[str, Any],
    lookup: Callable[[str], Mapping[str, Any]],
    _seen: tuple[str, ...] = (),
) -> dict[str, Any]:
    """Follow ``base`` links through *lookup* and return the merged document."""
    base_name = doc.get("base")
    if base_name is None:
        return dict(doc)
    if not isinstance(base_name, str):
        raise FixtureSchemaError("base must be a fixture name")
    if base_name in _seen:
        raise FixtureSchemaError(f"circular base chain: {' -> '.join(_seen + (base_name,))}")
    parent = resolve_document(lookup(base_name), lookup, _seen + (base_name,))
    child = {k: v for k, v in doc.items() if k != "base"}
    # descriptions and names never inherit
    parent.pop("description", None)
    merged = merge_documents(parent, child)
    merged.pop("base", None)
    logger.debug("merged fixture %r onto base %r", doc.get("name"), base_name)
    return merged


# ---------------------------------------------------------------------------
# Schema helpers
# ---------------------------------------------------------------------------


def _table(doc: Mapping[str, Any], key: str, *, required: bool = True) -> Mapping[str, Any] | None:
    value = doc.get(key)
    if value is None:
        if required:
            raise FixtureSchemaError(f"missing [{key}] table")
        return None
    if not isinstance(value, Mapping):
        raise FixtureSchemaError(f"{key} must be a table")
    return value


def _get(table: Mapping[str, Any], key: str, where: str, kind: type | tuple[type, ...]) -> Any:
    if key not in table:
        raise FixtureSchemaError(f"missing {where}.{key}")
    value = table[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise FixtureSchemaError(f"{where}.{key} has the wrong type ({type(value).__name__})")
    return value


def _expr(raw: object, coordinates: Sequence[str], parameters: Mapping[str, float], where: str) -> Expr:
    if isinstance(raw, bool) or not isinstance(raw, (str, int, float)):
        raise FixtureSchemaError(f"{where} must be an expression string or a number")
    if not isinstance(raw, str):
        return constant(float(raw))
    try:
        return parse(raw, coordinates, parameters)
    except ExprSyntaxError as exc:
        exc.add_note(f"in {where}")
        raise


def _vector(
    raw: object, size: int, coordinates: Sequence[str], parameters: Mapping[str, float], where: str
) -> list[Expr]:
    if not isinstance(raw, list) or len(raw) != size:
        raise FixtureSchemaError(f"{where} must list {size} components")
    return [_expr(c, coordinates, parameters, f"{where}[{i}]") for i, c in enumerate(raw)]


def _matrix(
    raw: object,
    rows: int,
    cols: int,
    coordinates: Sequence[str],
    parameters: Mapping[str, float],
    where: str,
) -> list[list[Expr]]:
    if not isinstance(raw, list) or len(raw) != rows:
        raise FixtureSchemaError(f"{where} must have {rows} rows")
    return [_vector(row, cols, coordinates, parameters, f"{where}[{i}]") for i, row in enumerate(raw)]


def _chart(table: Mapping[str, Any], parameters: Mapping[str, float], where: str, name: str) -> Chart:
    coordinates = _get(table, "coordinates", where, list)
    if not all(isinstance(c, str) for c in coordinates):
        raise FixtureSchemaError(f"{where}.coordinates must be names")
    box_raw = _get(table, "box", where, list)
    box = []
    for i, interval in enumerate(box_raw):
        if (
            not isinstance(interval, list)
            or len(interval) != 2
            or not all(isinstance(b, (int, float)) and not isinstance(b, bool) for b in interval)
        ):
            raise FixtureSchemaError(f"{where}.box[{i}] must be [low, high]")
        box.append((float(interval[0]), float(interval[1])))
    exclusions = tuple(
        _expr(e, coordinates, parameters, f"{where}.exclusions[{i}]")
        for i, e in enumerate(table.get("exclusions", []))
    )
    try:
        return Chart(tuple(coordinates), tuple(box), exclusions, name=name)
    except ValueError as exc:
        raise FixtureSchemaError(f"{where}: {exc}") from exc


def _sparse_tensor(
    table: Mapping[str, Any],
    chart: Chart,
    parameters: Mapping[str, float],
    where: str,
) -> TensorField:
    """``[[entries]]`` with ``index = [k, i, j]``; unlisted components are zero."""
    n = chart.dimension
    symmetric = table.get("symmetric", True)
    if not isinstance(symmetric, bool):
        raise FixtureSchemaError(f"{where}.symmetric must be true or false")
    components: list[list[list[Expr]]] = [
        [[constant(0.0) for _ in range(n)] for _ in range(n)] for _ in range(n)
    ]
    seen: set[tuple[int, int, int]] = set()
    for pos, entry in enumerate(table.get("entries", [])):
        spot = f"{where}.entries[{pos}]"
        if not isinstance(entry, Mapping):
            raise FixtureSchemaError(f"{spot} must be a table")
        index = _get(entry, "index", spot, list)
        if len(index) != 3 or not all(isinstance(i, int) and 0 <= i < n for i in index):
            raise FixtureSchemaError(f"{spot}.index must be three integers below {n}")
        k, i, j = index
        targets = {(k, i, j), (k, j, i)} if symmetric else {(k, i, j)}
        if targets & seen:
            raise FixtureSchemaError(f"{spot} repeats component {tuple(index)}")
        seen |= targets
        value = _expr(_get(entry, "expr", spot, (str, int, float)), chart.coordinates, parameters, f"{spot}.expr")
        for a, b, c in targets:
            components[a][b][c] = value
    return TensorField.build(chart, components)


# ---------------------------------------------------------------------------
# Building
# ---------------------------------------------------------------------------


def _parameters(doc: Mapping[str, Any], overrides: Mapping[str, float] | None) -> dict[str, float]:
    declared = _table(doc, "parameters", required=False) or {}
    values: dict[str, float] = {}
    for key, value in declared.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FixtureSchemaError(f"parameters.{key} must be a number")
        values[key] = float(value)
    for key, value in (overrides or {}).items():
        if key not in values:
            raise FixtureSchemaError(
                f"unknown parameter {key!r}; declared: {', '.join(sorted(values)) or 'none'}"
            )
        values[key] = float(value)
    return values


def _connection(
    doc: Mapping[str, Any], chart: Chart, metric: Metric, parameters: Mapping[str, float]
) -> tuple[Connection, DifferenceTensor | None, Connection | None]:
    table = _table(doc, "connection")
    assert table is not None
    kind = _get(table, "kind", "connection", str)
    if kind not in CONNECTION_KINDS:
        raise FixtureSchemaError(
            f"connection.kind must be one of {', '.join(CONNECTION_KINDS)}, not {kind!r}"
        )
    lc = LeviCivita(metric)
    difference = None
    if kind == "levi-civita":
        if table.get("entries"):
            raise FixtureSchemaError("a levi-civita connection takes no entries")
        connection: Connection = LeviCivita(metric, name="D")
    elif kind == "christoffel":
        connection = ChristoffelConnection(_sparse_tensor(table, chart, parameters, "connection"))
    else:
        difference = DifferenceTensor.from_field(_sparse_tensor(table, chart, parameters, "connection"))
        connection = ShiftedConnection(lc, difference)
    declared = table.get("declared_dual")
    declared_dual = None
    if declared is not None:
        if declared not in DECLARED_DUALS:
            raise FixtureSchemaError(f"connection.declared_dual must be one of {DECLARED_DUALS}")
        declared_dual = ReflectedConnection(connection, lc, name="declared")
    return connection, difference, declared_dual


def _contact(
    doc: Mapping[str, Any], chart: Chart, parameters: Mapping[str, float]
) -> ContactStructure | None:
    table = _table(doc, "contact", required=False)
    if table is None:
        return None
    n = chart.dimension
    if n % 2 != 1:
        raise FixtureSchemaError(f"a contact structure needs an odd dimension, got {n}")
    epsilon = table.get("epsilon", 1)
    if epsilon != 1:
        raise FixtureSchemaError("only spacelike characteristic fields (epsilon = 1) are supported")
    coords = chart.coordinates
    return ContactStructure(
        phi=Tensor11Field.build(chart, _matrix(table.get("phi"), n, n, coords, parameters, "contact.phi")),
        nu=VectorField.build(chart, _vector(table.get("nu"), n, coords, parameters, "contact.nu")),
        eta=OneForm.build(chart, _vector(table.get("eta"), n, coords, parameters, "contact.eta")),
        epsilon=1,
    )


def _hypersurface(
    doc: Mapping[str, Any], ambient: Chart, parameters: Mapping[str, float], name: str
) -> tuple[Hypersurface | None, ScreenDecomposition | None]:
    table = _table(doc, "hypersurface", required=False)
    if table is None:
        return None, None
    where = "hypersurface"
    chart = _chart(table, parameters, where, f"{name}.hypersurface")
    n = ambient.dimension
    m = chart.dimension
    if m != n - 1:
        raise FixtureSchemaError(f"{where} needs {n - 1} coordinates, got {m}")
    coords = chart.coordinates

    def vector(raw: object, spot: str) -> VectorField:
        return VectorField.build(chart, _vector(raw, n, coords, parameters, spot))

    def vectors(key: str, count: int) -> tuple[VectorField, ...]:
        raw = _get(table, key, where, list)
        if len(raw) != count:
            raise FixtureSchemaError(f"{where}.{key} must list {count} fields")
        return tuple(vector(v, f"{where}.{key}[{i}]") for i, v in enumerate(raw))

    embedding = vector(_get(table, "embedding", where, list), f"{where}.embedding")
    frame = vectors("frame", m)
    nu = vector(table["nu"], f"{where}.nu") if "nu" in table else None
    hypersurface = Hypersurface(chart, ambient, embedding, frame, nu)
    screen = ScreenDecomposition(
        xi=vector(_get(table, "xi", where, list), f"{where}.xi"),
        transversal=vector(_get(table, "transversal", where, list), f"{where}.transversal"),
        screen=vectors("screen", m - 1),
    )
    return hypersurface, screen


def _expectations(doc: Mapping[str, Any]) -> Expectations:
    table = _table(doc, "expect", required=False) or {}
    default = table.get("default", PASS)
    if default not in (PASS, REPORT_ONLY):
        raise FixtureSchemaError(f"expect.default must be {PASS!r} or {REPORT_ONLY!r}")
    patterns = {}
    for key in ("pass", "report_only"):
        raw = table.get(key, [])
        if not isinstance(raw, list) or not all(isinstance(p, str) for p in raw):
            raise FixtureSchemaError(f"expect.{key} must be a list of id patterns")
        patterns[key] = tuple(raw)
    return Expectations(default, patterns["pass"], patterns["report_only"])


def build_fixture(
    doc: Mapping[str, Any],
    *,
    parameters: Mapping[str, float] | None = None,
    source: str = "",
) -> Fixture:
    """Build a :class:`Fixture` from a resolved document (no ``base`` key)."""
    if "base" in doc:
        raise FixtureSchemaError("resolve base links before building")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FixtureSchemaError(f"format_version must be {FORMAT_VERSION}, got {version!r}")
    name = _get(doc, "name", "fixture", str)
    values = _parameters(doc, parameters)
    chart = _chart(_table(doc, "chart"), values, "chart", name)  # type: ignore[arg-type]
    n = chart.dimension
    metric_table = _table(doc, "metric")
    assert metric_table is not None
    index = metric_table.get("index", 0)
    if isinstance(index, bool) or not isinstance(index, int):
        raise FixtureSchemaError("metric.index must be an integer")
    entries = _matrix(metric_table.get("entries"), n, n, chart.coordinates, values, "metric.entries")
    try:
        metric = Metric.build(chart, entries, index=index)
    except ValueError as exc:
        raise FixtureSchemaError(f"metric: {exc}") from exc
    connection, difference, declared_dual = _connection(doc, chart, metric, values)
    hypersurface, screen = _hypersurface(doc, chart, values, name)
    contact = _contact(doc, chart, values)
    normalized = normalize(doc, values)
    return Fixture(
        name=name,
        description=str(doc.get("description", "")),
        chart=chart,
        metric=metric,
        connection=connection,
        dual=DualConnection(connection, metric, name="D*"),
        difference=difference,
        declared_dual=declared_dual,
        contact=contact,
        hypersurface=hypersurface,
        screen=screen,
        expectations=_expectations(doc),
        parameters=values,
        document=normalized,
        source=source,
    )


# ---------------------------------------------------------------------------
# Bootstrap
# ---------------------------------------------------------------------------


def bootstrap(
    fixture: Fixture,
    *,
    points: int = BOOTSTRAP_POINTS,
    seed: int = BOOTSTRAP_SEED,
    degeneracy: float = DEFAULT_DEGENERACY,
    max_rejections: int = 100_000,
) -> None:
    """Validate the declared objects at seeded points; raise at the first violation."""
    for point in fixture.chart.sample(points, seed, max_rejections=max_rejections):
        g = fixture.metric.values(point)
        defect, (i, j) = symmetry_defect(g)
        if not defect < SYMMETRY_LIMIT:
            raise BootstrapValidationError(f"metric symmetry g[{i}][{j}]", point, defect)
        det = abs(float(np.linalg.det(g)))
        if not det > degeneracy:
            raise BootstrapValidationError("metric determinant", point, det)
    if fixture.hypersurface is not None and fixture.screen is not None:
        chart = fixture.hypersurface.chart
        sites = fixture.hypersurface.sites(chart.sample(points, seed, max_rejections=max_rejections))
        validate_hypersurface(
            fixture.hypersurface, fixture.screen, fixture.metric, sites, degeneracy=degeneracy
        )
    logger.debug("bootstrapped fixture %s at %d points", fixture.name, points)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _canonical(raw: object, coordinates: Sequence[str], parameters: Mapping[str, float]) -> object:
    """Expression strings re-printed in canonical form; other values untouched."""
    if isinstance(raw, str):
        return pretty(parse(raw, coordinates, parameters))
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        return raw
    return pretty(constant(float(raw)))


def _canonical_nested(raw: object, coordinates: Sequence[str], parameters: Mapping[str, float]) -> object:
    if isinstance(raw, list):
        return [_canonical_nested(item, coordinates, parameters) for item in raw]
    return _canonical(raw, coordinates, parameters)


def normalize(doc: Mapping[str, Any], parameters: Mapping[str, float]) -> dict[str, Any]:
    """The document with canonical expression text and the parameter values in use."""
    out: dict[str, Any] = {
        "format_version": doc["format_version"],
        "name": doc["name"],
    }
    if doc.get("description"):
        out["description"] = doc["description"]
    if parameters:
        out["parameters"] = dict(sorted(parameters.items()))
    ambient = list(doc["chart"]["coordinates"])

    def chart_table(table: Mapping[str, Any], coords: Sequence[str]) -> dict[str, Any]:
        result = {
            "coordinates": list(coords),
            "box": [[float(lo), float(hi)] for lo, hi in table["box"]],
        }
        if table.get("exclusions"):
            result["exclusions"] = _canonical_nested(list(table["exclusions"]), coords, parameters)
        return result

    out["chart"] = chart_table(doc["chart"], ambient)
    out["metric"] = {
        "index": int(doc["metric"].get("index", 0)),
        "entries": _canonical_nested(doc["metric"]["entries"], ambient, parameters),
    }
    conn = doc["connection"]
    conn_out: dict[str, Any] = {"kind": conn["kind"]}
    if conn.get("entries"):
        conn_out["symmetric"] = bool(conn.get("symmetric", True))
        conn_out["entries"] = [
            {"index": list(e["index"]), "expr": _canonical(e["expr"], ambient, parameters)}
            for e in sorted(conn["entries"], key=lambda e: list(e["index"]))
        ]
    if conn.get("declared_dual"):
        conn_out["declared_dual"] = conn["declared_dual"]
    out["connection"] = conn_out
    if "contact" in doc:
        contact = doc["contact"]
        out["contact"] = {
            "epsilon": int(contact.get("epsilon", 1)),
            "eta": _canonical_nested(contact["eta"], ambient, parameters),
            "nu": _canonical_nested(contact["nu"], ambient, parameters),
            "phi": _canonical_nested(contact["phi"], ambient, parameters),
        }
    if "hypersurface" in doc:
        hyp = doc["hypersurface"]
        local = list(hyp["coordinates"])
        hyp_out = chart_table(hyp, local)
        for key in ("embedding", "frame", "xi", "transversal", "screen", "nu"):
            if key in hyp:
                hyp_out[key] = _canonical_nested(hyp[key], local, parameters)
        out["hypersurface"] = hyp_out
    if "expect" in doc:
        expect = doc["expect"]
        out["expect"] = {
            key: (list(expect[key]) if isinstance(expect[key], list) else expect[key])
            for key in ("default", "pass", "report_only")
            if key in expect
        }
    return out


def serialize(fixture: Fixture | Mapping[str, Any]) -> str:
    """TOML text of the normalized document, with a fixed table order."""
    data = fixture.document if isinstance(fixture, Fixture) else fixture
    doc = tomlkit.document()
    for key in ("format_version", "name", "description"):
        if key in data:
            doc.add(key, data[key])
    for key in _TABLES:
        if key not in data:
            continue
        table = tomlkit.table()
        for sub, value in data[key].items():
            if key == "connection" and sub == "entries":
                aot = tomlkit.aot()
                for entry in value:
                    item = tomlkit.table()
                    item.add("index", entry["index"])
                    item.add("expr", entry["expr"])
                    aot.append(item)
                table.add(sub, aot)
            else:
                table.add(sub, value)
        doc.add(tomlkit.nl())
        doc.add(key, table)
    return tomlkit.dumps(doc)
