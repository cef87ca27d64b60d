"""Charts, expression-valued tensor fields and the pointwise calculus."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import ExprDomainError, SamplingError
from .expr import DualScalar, Expr
from .jets import Jet, jet_einsum, stack

logger = logging.getLogger(__name__)

__all__ = [
    "Chart",
    "Metric",
    "OneForm",
    "ScalarField",
    "Site",
    "Tensor11Field",
    "TensorField",
    "VectorField",
    "as_family",
    "as_jet",
    "brackets",
    "directional_derivative",
    "draw_coefficients",
    "family",
    "inner",
    "lie_bracket",
    "metric_apply",
    "polynomial_fields",
    "symmetry_defect",
]


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Chart:
    """A single coordinate chart with a sampling box and exclusion predicates.

    A point is admissible when it lies in the box and every exclusion
    expression evaluates to a positive number there.
    """

    coordinates: tuple[str, ...]
    box: tuple[tuple[float, float], ...]
    exclusions: tuple[Expr, ...] = ()
    name: str = "chart"

    def __post_init__(self) -> None:
        if not self.coordinates:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(self.coordinates)) != len(self.coordinates):
            raise ValueError(f"duplicate coordinate names in {self.coordinates}")
        if len(self.box) != len(self.coordinates):
            raise ValueError(
                f"box has {len(self.box)} intervals for {len(self.coordinates)} coordinates"
            )
        for name, (lo, hi) in zip(self.coordinates, self.box):
            if not lo < hi:
                raise ValueError(f"empty interval [{lo}, {hi}] for {name}")

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def contains(self, point: Sequence[float]) -> bool:
        coords = [float(c) for c in point]
        if len(coords) != self.dimension:
            return False
        if any(not lo <= c <= hi for c, (lo, hi) in zip(coords, self.box)):
            return False
        for predicate in self.exclusions:
            try:
                if not predicate.evaluate(coords) > 0.0:
                    return False
            except ExprDomainError:
                return False
        return True

    def sample(self, count: int, seed: int, *, max_rejections: int = 100_000) -> np.ndarray:
        """Draw *count* admissible points with a PCG64 generator seeded by *seed*."""
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in self.box], dtype=float)
        hi = np.array([b[1] for b in self.box], dtype=float)
        points: list[np.ndarray] = []
        rejected = 0
        while len(points) < count:
            candidate = rng.uniform(lo, hi)
            if self.contains(candidate):
                points.append(candidate)
                continue
            rejected += 1
            if rejected > max_rejections:
                raise SamplingError(
                    f"chart {self.name!r} rejected {rejected} candidates "
                    f"after accepting {len(points)} of {count}"
                )
        logger.debug(
            "sampled %d points on %s (seed %d, %d rejected)", count, self.name, seed, rejected
        )
        return np.array(points, dtype=float).reshape(count, self.dimension)


# ---------------------------------------------------------------------------
# Expression-valued fields
# ---------------------------------------------------------------------------


def _flatten(nested: object, depth: int) -> tuple[list[Expr], tuple[int, ...]]:
    if depth == 0:
        if not isinstance(nested, Expr):
            raise TypeError(f"expected an expression, got {type(nested).__name__}")
        return [nested], ()
    items = list(nested)  # type: ignore[call-overload]
    flat: list[Expr] = []
    inner_shape: tuple[int, ...] | None = None
    for item in items:
        entries, shape = _flatten(item, depth - 1)
        if inner_shape is not None and shape != inner_shape:
            raise ValueError("ragged component array")
        inner_shape = shape
        flat.extend(entries)
    return flat, (len(items),) + (inner_shape or ())


@dataclass(frozen=True, eq=False)
class TensorField:
    """Array of expressions over one chart, stored row-major."""

    chart: Chart
    shape: tuple[int, ...]
    entries: tuple[Expr, ...]
    rank = -1

    def __post_init__(self) -> None:
        if len(self.entries) != math.prod(self.shape):
            raise ValueError(f"{len(self.entries)} entries for shape {self.shape}")
        if self.rank >= 0 and len(self.shape) != self.rank:
            raise ValueError(f"{type(self).__name__} needs {self.rank} axes, got {self.shape}")

    @classmethod
    def build(cls, chart: Chart, components: object, **extra: object) -> TensorField:
        depth = cls.rank if cls.rank >= 0 else _depth(components)
        flat, shape = _flatten(components, depth)
        return cls(chart, shape, tuple(flat), **extra)  # type: ignore[arg-type]

    def component(self, *index: int) -> Expr:
        return self.entries[int(np.ravel_multi_index(index, self.shape))]

    def nested(self) -> object:
        """Components as nested lists, the inverse of :meth:`build`."""
        array = np.empty(len(self.entries), dtype=object)
        array[:] = list(self.entries)
        return array.reshape(self.shape).tolist()

    def values(self, point: Sequence[float]) -> np.ndarray:
        coords = [float(c) for c in point]
        flat = np.array([float(e.evaluate(coords)) for e in self.entries])
        return flat.reshape(self.shape)

    def jet(self, point: Sequence[float]) -> Jet:
        coords = np.asarray(point, dtype=float)
        n = coords.shape[0]
        seeds = np.eye(n)
        duals = [DualScalar(c, seeds[i]) for i, c in enumerate(coords)]
        values = np.zeros(len(self.entries))
        grads = np.zeros((len(self.entries), n))
        for idx, entry in enumerate(self.entries):
            result = entry.evaluate(duals)
            if isinstance(result, DualScalar):
                values[idx] = result.value
                grads[idx] = result.partials
            else:
                values[idx] = result
        return Jet(values.reshape(self.shape), grads.reshape(self.shape + (n,)))


def _depth(components: object) -> int:
    depth = 0
    while not isinstance(components, Expr):
        components = next(iter(components))  # type: ignore[call-overload]
        depth += 1
    return depth


@dataclass(frozen=True, eq=False)
class ScalarField(TensorField):
    rank = 0


@dataclass(frozen=True, eq=False)
class VectorField(TensorField):
    rank = 1


@dataclass(frozen=True, eq=False)
class OneForm(TensorField):
    rank = 1


@dataclass(frozen=True, eq=False)
class Tensor11Field(TensorField):
    """(1,1)-tensor with ``entries[i][j] = T^i_j``, so ``(TX)^i = T^i_j X^j``."""

    rank = 2


@dataclass(frozen=True, eq=False)
class Metric(TensorField):
    index: int = 0
    rank = 2

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.shape[0] != self.shape[1]:
            raise ValueError(f"metric must be square, got {self.shape}")
        if not 0 <= self.index <= self.shape[0]:
            raise ValueError(f"index {self.index} out of range for dimension {self.shape[0]}")


def symmetry_defect(matrix: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Largest ``|m_ij - m_ji|`` with its position (``i < j``)."""
    diff = np.abs(matrix - matrix.T)
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    i, j = (int(i), int(j)) if i <= j else (int(j), int(i))
    return float(diff[i, j]), (i, j)


# ---------------------------------------------------------------------------
# Evaluation sites
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Site:
    """One sample point, on the ambient chart or on an embedded chart.

    Fields declared on the ambient chart are evaluated at the image point and
    their gradients chained through the embedding, so every jet handed out
    by :meth:`jet` is taken over the site's own coordinates.
    """

    chart: Chart
    point: np.ndarray
    index: int = 0
    ambient: Chart | None = None
    embedding: VectorField | None = None
    image: np.ndarray = field(init=False)
    jacobian: np.ndarray = field(init=False)
    _pinv: np.ndarray = field(init=False, repr=False)
    _ambient_jets: dict[int, Jet] = field(default_factory=dict, init=False, repr=False)
    _local_jets: dict[int, Jet] = field(default_factory=dict, init=False, repr=False)
    _coefficients: dict[int, np.ndarray] = field(default_factory=dict, init=False, repr=False)
    _keep: list[object] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self) -> None:
        self.point = np.asarray(self.point, dtype=float)
        if self.ambient is None:
            self.ambient = self.chart
        if self.embedding is None:
            if self.ambient is not self.chart:
                raise ValueError("an embedded site needs an embedding")
            self.image = self.point
            self.jacobian = np.eye(self.chart.dimension)
            self._pinv = self.jacobian
        else:
            jet = self.embedding.jet(self.point)
            self.image = jet.value
            self.jacobian = jet.grad
            self._pinv = np.linalg.pinv(jet.grad)

    @property
    def embedded(self) -> bool:
        return self.embedding is not None

    @property
    def order(self) -> int:
        return self.chart.dimension

    def _remember(self, obj: object) -> int:
        # ids are only stable while the object is alive
        self._keep.append(obj)
        return id(obj)

    def ambient_jet(self, tensor: TensorField) -> Jet:
        """Jet of an ambient field at the image point, over ambient coordinates."""
        if tensor.chart is not self.ambient:
            raise ValueError(f"field on chart {tensor.chart.name!r} is not ambient here")
        key = id(tensor)
        if key not in self._ambient_jets:
            self._ambient_jets[self._remember(tensor)] = tensor.jet(self.image)
        return self._ambient_jets[key]

    def jet(self, tensor: TensorField) -> Jet:
        """Jet of *tensor* over this site's coordinates."""
        if tensor.chart is self.ambient:
            ambient = self.ambient_jet(tensor)
            return ambient.pullback(self.jacobian) if self.embedded else ambient
        if tensor.chart is not self.chart:
            raise ValueError(
                f"field on chart {tensor.chart.name!r} cannot be evaluated on {self.chart.name!r}"
            )
        key = id(tensor)
        if key not in self._local_jets:
            self._local_jets[self._remember(tensor)] = tensor.jet(self.point)
        return self._local_jets[key]

    def lift(self, vectors: np.ndarray) -> np.ndarray:
        """Site-coordinate components of tangent *vectors* given in ambient components."""
        return np.tensordot(self._pinv, vectors, axes=([1], [0]))

    def tangency_residual(self, vectors: np.ndarray) -> np.ndarray:
        """Distance of each ambient vector from the tangent space, per column."""
        projected = np.tensordot(self.jacobian, self.lift(vectors), axes=([1], [0]))
        return np.abs(vectors - projected).max(axis=0)

    def coefficients(self, connection: object) -> np.ndarray:
        """Christoffel array ``[k, i, j]`` of *connection* at the image point (cached)."""
        key = id(connection)
        if key not in self._coefficients:
            self._coefficients[self._remember(connection)] = connection.evaluate(self)  # type: ignore[attr-defined]
        return self._coefficients[key]


# ---------------------------------------------------------------------------
# Pointwise calculus
# ---------------------------------------------------------------------------


def as_jet(site: Site, obj: TensorField | Jet) -> Jet:
    return obj if isinstance(obj, Jet) else site.jet(obj)


def inner(g: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``g(x, y)`` contracting the first axis of *x* and of *y*."""
    left = np.tensordot(x, g, axes=([0], [0]))
    return np.tensordot(left, y, axes=([-1], [0]))


def metric_apply(
    g: Metric,
    x: TensorField | Jet | np.ndarray,
    y: TensorField | Jet | np.ndarray,
    site: Site,
) -> float | np.ndarray:
    gval = site.ambient_jet(g).value
    xv = x if isinstance(x, np.ndarray) else as_jet(site, x).value
    yv = y if isinstance(y, np.ndarray) else as_jet(site, y).value
    result = inner(gval, xv, yv)
    return float(result) if np.ndim(result) == 0 else result


def directional_derivative(
    x: TensorField | Jet, s: TensorField | Jet, site: Site
) -> float | np.ndarray:
    """``X(s)``: derivative of the scalar (or array) field *s* along tangent *X*."""
    xj = as_jet(site, x)
    sj = as_jet(site, s)
    result = sj.derivative(site.lift(xj.value))
    return float(result) if np.ndim(result) == 0 else result


def brackets(site: Site, x: Jet, y: Jet) -> np.ndarray:
    """Lie brackets ``[X_f, Y_g]`` of two families, shape ``(n, F, G)``."""
    xu = site.lift(x.value)
    yu = site.lift(y.value)
    return np.einsum("kgm,mf->kfg", y.grad, xu) - np.einsum("kfm,mg->kfg", x.grad, yu)


def lie_bracket(x: TensorField | Jet, y: TensorField | Jet, site: Site) -> np.ndarray:
    xj, single_x = as_family(as_jet(site, x))
    yj, single_y = as_family(as_jet(site, y))
    result = brackets(site, xj, yj)
    if single_x and single_y:
        return result[:, 0, 0]
    return result


def as_family(jet: Jet) -> tuple[Jet, bool]:
    if jet.value.ndim == 1:
        return Jet(jet.value[:, None], jet.grad[:, None, :]), True
    return jet, False


def family(site: Site, fields: Iterable[TensorField | Jet]) -> Jet:
    """Stack vector fields into a family jet: value ``(n, F)``, grad ``(n, F, m)``."""
    return stack([as_jet(site, f) for f in fields])


def draw_coefficients(
    rng: np.random.Generator, count: int, frame_size: int, order: int
) -> np.ndarray:
    """Coefficients of *count* random linear-polynomial combinations of a frame."""
    return rng.uniform(-1.0, 1.0, size=(count, frame_size, order + 1))


def polynomial_fields(site: Site, frame: Jet, coefficients: np.ndarray) -> Jet:
    """Fields ``sum_a (c_a0 + sum_b c_ab u_b) E_a`` built from a frame family."""
    constant = coefficients[:, :, 0]
    linear = coefficients[:, :, 1:]
    weights = Jet(constant + linear @ site.point, linear)
    return jet_einsum("ra,ka->kr", weights, frame)
