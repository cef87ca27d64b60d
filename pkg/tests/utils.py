from __future__ import annotations

from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np

from pylightlike.expr import parse
from pylightlike.fixtures import Fixture
from pylightlike.geometry import Chart, Metric, Site, VectorField

# Euclidean R^3 with the plane z = 0: a hypersurface that is not lightlike.
EUCLIDEAN_PLANE = """\
format_version = 1
name = "euclidean_plane"

[chart]
coordinates = ["x", "y", "z"]
box = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]

[metric]
entries = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

[connection]
kind = "levi-civita"

[hypersurface]
coordinates = ["u", "v"]
box = [[-1.0, 1.0], [-1.0, 1.0]]
embedding = ["u", "v", 0]
frame = [[1, 0, 0], [0, 1, 0]]
xi = [1, 0, 0]
transversal = [0, 0, 1]
screen = [[0, 1, 0]]
"""

# Flat Minkowski plane with a parameterised cubic connection.
MINKOWSKI_PLANE = """\
format_version = 1
name = "{name}"

[parameters]
c = 1.0

[chart]
coordinates = ["t", "x"]
box = [[-1.0, 1.0], [-1.0, 1.0]]

[metric]
index = 1
entries = [[-1, 0], [0, 1]]

[connection]
kind = "shifted"

[[connection.entries]]
index = [1, 1, 1]
expr = "c*x"
"""


def write_fixture(root: Path, text: str, name: str = "custom") -> Path:
    path = root / f"{name}.toml"
    path.write_text(text, encoding="utf-8")
    return path


def flat_chart(*coordinates: str, half_width: float = 1.0) -> Chart:
    return Chart(tuple(coordinates), tuple((-half_width, half_width) for _ in coordinates))


def vector_field(chart: Chart, *components: str) -> VectorField:
    return VectorField.build(chart, [parse(c, chart.coordinates) for c in components])


def metric(chart: Chart, rows: Sequence[Sequence[str]], index: int = 0) -> Metric:
    entries = [[parse(c, chart.coordinates) for c in row] for row in rows]
    return Metric.build(chart, entries, index=index)


def ambient_sites(fixture: Fixture, count: int = 16, seed: int = 42) -> list[Site]:
    points = fixture.chart.sample(count, seed)
    return [Site(fixture.chart, p, index=i) for i, p in enumerate(points)]


def hypersurface_sites(fixture: Fixture, count: int = 16, seed: int = 42) -> list[Site]:
    assert fixture.hypersurface is not None
    return fixture.hypersurface.sites(fixture.hypersurface.chart.sample(count, seed))


def central_difference(
    f: Callable[[np.ndarray], float], point: Sequence[float], h: float = 1e-6
) -> np.ndarray:
    """Gradient of a scalar function by central differences."""
    x = np.asarray(point, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (f(x + step) - f(x - step)) / (2.0 * h)
    return grad
