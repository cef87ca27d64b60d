"""Lightlike hypersurfaces: null frames, Gauss-Weingarten splitting and suites.

Hypersurface fields carry ambient components written over hypersurface
coordinates.  Every derivative is taken in those coordinates, with ambient
connection coefficients evaluated at the image point.  ``theta`` is the
transversal form ``theta(X) = g(X, N)``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

from .connection import (
    DEFAULT_DEGENERACY,
    Connection,
    DualConnection,
    covariant_derivative,
    covariant_derivatives,
    label,
    levi_civita,
)
from .errors import (
    BootstrapValidationError,
    DecompositionError,
    DegeneracyTooHighError,
    NoRealSolutionError,
    NotLightlikeError,
    SingularScreenError,
)
from .geometry import (
    Chart,
    Metric,
    Site,
    TensorField,
    VectorField,
    as_family,
    as_jet,
    brackets,
    draw_coefficients,
    family,
    inner,
    polynomial_fields,
)
from .jets import Jet, jet_einsum
from .report import CONDITIONAL, IDENTITY, REPORT, SuiteResult

if TYPE_CHECKING:
    from .fixtures.format import Fixture

logger = logging.getLogger(__name__)

__all__ = [
    "Hypersurface",
    "Induced",
    "InducedObjects",
    "Probe",
    "ScreenDecomposition",
    "gauss_decompose",
    "induced_metric",
    "probes",
    "radical",
    "radical_decompose",
    "screen_decompose",
    "sine_residual",
    "solve_transversal",
    "suite_section2",
    "suite_section3",
    "validate_hypersurface",
    "weingarten_decompose",
]

DECOMPOSITION_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# Hypersurface data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Hypersurface:
    """An immersed hypersurface given by a parametrization and a tangent frame.

    ``nu`` is the distinguished tangent field used by screen semi-invariant
    structures; it is optional for the plain lightlike pipeline.
    """

    chart: Chart
    ambient: Chart
    embedding: VectorField
    frame: tuple[VectorField, ...]
    nu: VectorField | None = None

    def __post_init__(self) -> None:
        n = self.ambient.dimension
        if n != self.chart.dimension + 1:
            raise ValueError(
                f"hypersurface chart has {self.chart.dimension} coordinates "
                f"in a {n}-dimensional ambient"
            )
        if self.embedding.chart is not self.chart or self.embedding.shape != (n,):
            raise ValueError("embedding must give all ambient coordinates over the hypersurface chart")
        if len(self.frame) != self.chart.dimension:
            raise ValueError(
                f"tangent frame has {len(self.frame)} fields, expected {self.chart.dimension}"
            )
        for field in self._vector_fields():
            if field.shape != (n,):
                raise ValueError(f"hypersurface fields need {n} ambient components")

    def _vector_fields(self) -> list[VectorField]:
        fields = list(self.frame)
        if self.nu is not None:
            fields.append(self.nu)
        return fields

    def site(self, point: Sequence[float], index: int = 0) -> Site:
        return Site(
            self.chart,
            np.asarray(point, dtype=float),
            index=index,
            ambient=self.ambient,
            embedding=self.embedding,
        )

    def sites(self, points: np.ndarray) -> list[Site]:
        return [self.site(p, i) for i, p in enumerate(points)]

    def frame_matrix(self, site: Site) -> np.ndarray:
        return family(site, self.frame).value


@dataclass(frozen=True, eq=False)
class ScreenDecomposition:
    """Analytic null frame: radical generator, lightlike transversal and screen."""

    xi: VectorField
    transversal: VectorField
    screen: tuple[VectorField, ...]

    def theta(self, g: Metric, x: TensorField | Jet | np.ndarray, site: Site) -> float | np.ndarray:
        xv = x if isinstance(x, np.ndarray) else as_jet(site, x).value
        result = inner(site.ambient_jet(g).value, xv, site.jet(self.transversal).value)
        return float(result) if np.ndim(result) == 0 else result

    def project(self, g: Metric, y: TensorField | Jet, site: Site) -> Jet:
        """Screen projection ``PY = Y - theta(Y) xi`` as a jet."""
        yj, single = as_family(as_jet(site, y))
        theta = jet_einsum("kf,kl,l->f", yj, site.jet(g), site.jet(self.transversal))
        projected = yj - jet_einsum("f,k->kf", theta, site.jet(self.xi))
        return projected[:, 0] if single else projected


def _metric_value(site: Site, g: Metric) -> np.ndarray:
    return site.ambient_jet(g).value


def induced_metric(hypersurface: Hypersurface, g: Metric, site: Site) -> np.ndarray:
    """Gram matrix of the tangent frame."""
    frame = hypersurface.frame_matrix(site)
    return frame.T @ _metric_value(site, g) @ frame


def radical(
    hypersurface: Hypersurface,
    g: Metric,
    site: Site,
    *,
    transversal: VectorField | None = None,
    degeneracy: float = DEFAULT_DEGENERACY,
) -> np.ndarray:
    """Ambient components of the generator of the radical of the induced metric.

    Scaled so that ``g(generator, N) = 1`` when *transversal* is given,
    otherwise unit coordinate norm with the first nonzero coordinate positive.
    """
    gram = induced_metric(hypersurface, g, site)
    _, singular, vh = scipy.linalg.svd(gram)
    scale = max(1.0, float(singular[0]))
    deficiency = int(np.count_nonzero(singular < degeneracy * scale))
    if deficiency == 0:
        raise NotLightlikeError(
            f"induced metric is nondegenerate at {tuple(site.point.tolist())}", singular
        )
    if deficiency > 1:
        raise DegeneracyTooHighError(
            f"induced metric has a {deficiency}-dimensional radical at {tuple(site.point.tolist())}",
            singular,
        )
    generator = hypersurface.frame_matrix(site) @ vh[-1]
    if transversal is not None:
        pairing = inner(_metric_value(site, g), generator, site.jet(transversal).value)
        if abs(pairing) < degeneracy:
            raise DecompositionError(
                f"declared transversal is orthogonal to the radical at {tuple(site.point.tolist())}"
            )
        return generator / pairing
    generator = generator / np.linalg.norm(generator)
    lead = np.flatnonzero(np.abs(generator) > degeneracy)
    if lead.size and generator[lead[0]] < 0:
        generator = -generator
    return generator


def sine_residual(u: np.ndarray, v: np.ndarray) -> float:
    """Sine of the Euclidean angle between two coordinate vectors."""
    uh = u / np.linalg.norm(u)
    vh = v / np.linalg.norm(v)
    return float(np.linalg.norm(uh - np.dot(uh, vh) * vh))


def solve_transversal(
    g: Metric,
    xi: np.ndarray,
    screen: np.ndarray,
    site: Site,
    *,
    degeneracy: float = DEFAULT_DEGENERACY,
) -> np.ndarray:
    """The null vector ``N`` with ``g(N, xi) = 1`` orthogonal to the screen.

    *screen* holds the screen vectors as columns.  The linear conditions leave
    a line ``N0 + a k``; the null condition is the quadratic
    ``g(k,k) a^2 + 2 g(N0,k) a + g(N0,N0) = 0``, of which the smaller root
    is taken.
    """
    gval = _metric_value(site, g)
    screen = np.asarray(screen, dtype=float).reshape(gval.shape[0], -1)
    gram = screen.T @ gval @ screen
    if screen.shape[1] and abs(float(np.linalg.det(gram))) < degeneracy:
        raise SingularScreenError(
            f"screen Gram determinant {np.linalg.det(gram):.3e} at {tuple(site.point.tolist())}"
        )
    rows = np.vstack([xi @ gval, screen.T @ gval])
    rhs = np.zeros(rows.shape[0])
    rhs[0] = 1.0
    particular, _, rank, _ = scipy.linalg.lstsq(rows, rhs)
    if rank < rows.shape[0]:
        raise SingularScreenError(
            f"radical and screen are dependent at {tuple(site.point.tolist())}"
        )
    kernel = scipy.linalg.null_space(rows)
    if kernel.shape[1] != 1:
        raise SingularScreenError(
            f"transversal conditions leave {kernel.shape[1]} free directions"
        )
    k = kernel[:, 0]
    a = float(k @ gval @ k)
    b = float(2.0 * particular @ gval @ k)
    c = float(particular @ gval @ particular)
    if abs(a) <= degeneracy:
        if abs(b) <= degeneracy:
            raise NoRealSolutionError(a, b, c)
        root = -c / b
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            raise NoRealSolutionError(a, b, c)
        q = -0.5 * (b + np.copysign(np.sqrt(disc), b))
        roots = [q / a] + ([c / q] if q != 0.0 else [])
        root = min(roots, key=abs)
    return particular + root * k


# ---------------------------------------------------------------------------
# Pointwise decompositions
# ---------------------------------------------------------------------------


def _require_tangent(site: Site, vector: np.ndarray, tol: float, what: str) -> None:
    residual = float(site.tangency_residual(np.reshape(vector, (vector.shape[0], -1))).max())
    if residual > tol:
        raise DecompositionError(
            f"{what} part is not tangent at {tuple(site.point.tolist())} (residual {residual:.3e})"
        )


def gauss_decompose(
    d: Connection,
    sd: ScreenDecomposition,
    g: Metric,
    x: TensorField | Jet,
    y: TensorField | Jet,
    site: Site,
    *,
    tol: float = DECOMPOSITION_TOLERANCE,
) -> tuple[np.ndarray, float]:
    """Split ``D_X Y`` into its tangent part and ``B(X, Y) = g(D_X Y, xi)``."""
    gval = _metric_value(site, g)
    full = covariant_derivative(d, x, y, site)
    b = float(inner(gval, full, site.jet(sd.xi).value))
    tangent = full - b * site.jet(sd.transversal).value
    _require_tangent(site, tangent, tol, "Gauss tangent")
    return tangent, b


def weingarten_decompose(
    d: Connection,
    sd: ScreenDecomposition,
    g: Metric,
    x: TensorField | Jet,
    site: Site,
    *,
    tol: float = DECOMPOSITION_TOLERANCE,
) -> tuple[np.ndarray, float]:
    """``D_X N = -A_N X + tau(X) N``; returns ``(A_N X, tau(X))``."""
    gval = _metric_value(site, g)
    n_vec = site.jet(sd.transversal).value
    full = covariant_derivative(d, x, sd.transversal, site)
    tau = float(inner(gval, full, site.jet(sd.xi).value))
    shape = -(full - tau * n_vec)
    _require_tangent(site, shape, tol, "shape operator")
    return shape, tau


def screen_decompose(
    d: Connection,
    sd: ScreenDecomposition,
    g: Metric,
    x: TensorField | Jet,
    y: TensorField | Jet,
    site: Site,
    *,
    tol: float = DECOMPOSITION_TOLERANCE,
) -> tuple[np.ndarray, float]:
    """``D_X PY = nabla_X PY + C(X, PY) xi``; returns ``(nabla_X PY, C(X, PY))``."""
    tangent, _ = gauss_decompose(d, sd, g, x, sd.project(g, y, site), site, tol=tol)
    c = float(sd.theta(g, tangent, site))
    return tangent - c * site.jet(sd.xi).value, c


def radical_decompose(
    d: Connection,
    sd: ScreenDecomposition,
    g: Metric,
    x: TensorField | Jet,
    site: Site,
    *,
    dual: Connection | None = None,
    tol: float = DECOMPOSITION_TOLERANCE,
) -> tuple[np.ndarray, float]:
    """``D_X xi = -A_xi X + theta(D_X xi) xi``.

    Returns ``(A_xi X, -theta(D_X xi) - tau*(X))``, the second entry being the
    consistency residual against the Weingarten form of the dual connection.
    """
    tangent, _ = gauss_decompose(d, sd, g, x, sd.xi, site, tol=tol)
    theta = float(sd.theta(g, tangent, site))
    shape_xi = -(tangent - theta * site.jet(sd.xi).value)
    _, tau_star = weingarten_decompose(dual or DualConnection(d, g), sd, g, x, site, tol=tol)
    return shape_xi, -theta - tau_star


# ---------------------------------------------------------------------------
# Field families at a site
# ---------------------------------------------------------------------------


def _concat(jets: Sequence[Jet]) -> Jet:
    return Jet(
        np.concatenate([j.value for j in jets], axis=1),
        np.concatenate([j.grad for j in jets], axis=1),
    )


@dataclass(eq=False)
class Probe:
    """Null frame and a tangent field family at one hypersurface site.

    The family always starts with ``xi``; screen fields, the tangent frame and
    random polynomial combinations of the frame follow.
    """

    site: Site
    g: np.ndarray
    metric: Jet
    xi: Jet
    transversal: Jet
    screen: Jet
    fields: Jet
    theta: np.ndarray
    projected: Jet

    @classmethod
    def build(
        cls,
        site: Site,
        hypersurface: Hypersurface,
        sd: ScreenDecomposition,
        g: Metric,
        coefficients: np.ndarray,
    ) -> Probe:
        xi = site.jet(sd.xi)
        transversal = site.jet(sd.transversal)
        screen = family(site, sd.screen)
        frame = family(site, hypersurface.frame)
        parts = [as_family(xi)[0], screen, frame]
        if coefficients.size:
            parts.append(polynomial_fields(site, frame, coefficients))
        fields = _concat(parts)
        metric = site.jet(g)
        theta = jet_einsum("kf,kl,l->f", fields, metric, transversal)
        projected = fields - jet_einsum("f,k->kf", theta, xi)
        return cls(
            site=site,
            g=metric.value,
            metric=metric,
            xi=xi,
            transversal=transversal,
            screen=screen,
            fields=fields,
            theta=theta.value,
            projected=projected,
        )

    @property
    def size(self) -> int:
        return self.fields.value.shape[1]

    def pair(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return inner(self.g, x, y)

    def derivatives(self, gamma: np.ndarray, y: Jet) -> np.ndarray:
        """``D_{X_f} Y`` for every family member ``X_f``."""
        y_family, single = as_family(y)
        result = covariant_derivatives(gamma, self.site, self.fields.value, y_family)
        return result[:, :, 0] if single else result

    def derivative_of_inner(self) -> np.ndarray:
        """``X g(Y, Z)`` over the family, indexed ``[x, y, z]``."""
        gyz = jet_einsum("ia,ij,jb->ab", self.fields, self.metric, self.fields)
        along = gyz.derivative(self.site.lift(self.fields.value))
        return np.moveaxis(along, -1, 0)

    def metric_derivative(self, xgyz: np.ndarray, tangent: np.ndarray) -> np.ndarray:
        """``(D_X g)(Y, Z)`` for an induced connection given by its values ``D_X Y``."""
        fv = self.fields.value
        return (
            xgyz
            - np.einsum("kxy,kl,lz->xyz", tangent, self.g, fv)
            - np.einsum("ky,kl,lxz->xyz", fv, self.g, tangent)
        )


def probes(
    hypersurface: Hypersurface,
    sd: ScreenDecomposition,
    g: Metric,
    sites: Sequence[Site],
    *,
    random_fields: int = 2,
    seed: int = 42,
) -> list[Probe]:
    """One probe per site; random fields come from a stream derived from *seed*."""
    rng = np.random.default_rng([seed, 1])
    result = []
    for site in sites:
        coefficients = draw_coefficients(rng, random_fields, len(hypersurface.frame), site.order)
        result.append(Probe.build(site, hypersurface, sd, g, coefficients))
    return result


@dataclass(frozen=True)
class Induced:
    """Gauss-Weingarten data of one ambient connection over a probe family.

    Vector arrays are indexed ``[k, x]`` or ``[k, x, y]``, scalars ``[x]`` or
    ``[x, y]``.
    """

    full: np.ndarray  # ambient D_X Y
    b: np.ndarray  # B(X, Y)
    tangent: np.ndarray  # induced D_X Y
    tau: np.ndarray  # tau(X)
    shape: np.ndarray  # A_N X
    b_xi: np.ndarray  # B(X, xi)
    radical: np.ndarray  # induced D_X xi
    theta_radical: np.ndarray  # theta(D_X xi)
    shape_xi: np.ndarray  # screen part -P(D_X xi)
    b_projected: np.ndarray  # B(X, PY)
    screen_form: np.ndarray  # C(X, PY)
    screen_connection: np.ndarray  # nabla_X PY

    @classmethod
    def compute(cls, probe: Probe, gamma: np.ndarray) -> Induced:
        xi = probe.xi.value
        n_vec = probe.transversal.value
        along = probe.pair

        full = probe.derivatives(gamma, probe.fields)
        b = along(full, xi)
        tangent = full - np.multiply.outer(n_vec, b)
        full_n = probe.derivatives(gamma, probe.transversal)
        tau = along(full_n, xi)
        shape = -(full_n - np.multiply.outer(n_vec, tau))
        full_xi = probe.derivatives(gamma, probe.xi)
        b_xi = along(full_xi, xi)
        radical_part = full_xi - np.multiply.outer(n_vec, b_xi)
        theta_radical = along(radical_part, n_vec)
        shape_xi = -(radical_part - np.multiply.outer(xi, theta_radical))
        full_p = probe.derivatives(gamma, probe.projected)
        b_projected = along(full_p, xi)
        d_p = full_p - np.multiply.outer(n_vec, b_projected)
        screen_form = along(d_p, n_vec)
        return cls(
            full=full,
            b=b,
            tangent=tangent,
            tau=tau,
            shape=shape,
            b_xi=b_xi,
            radical=radical_part,
            theta_radical=theta_radical,
            shape_xi=shape_xi,
            b_projected=b_projected,
            screen_form=screen_form,
            screen_connection=d_p - np.multiply.outer(xi, screen_form),
        )

    def shape_xi_with_tau(self, xi: np.ndarray) -> np.ndarray:
        """``-(D_X xi + tau(X) xi)``, the radical shape operator of a self-dual connection."""
        return -(self.radical + np.multiply.outer(xi, self.tau))


@dataclass(frozen=True)
class InducedObjects:
    """Induced data of a dual pair on one probe."""

    probe: Probe
    primal: Induced
    dual: Induced

    @classmethod
    def at(cls, probe: Probe, d: Connection, d_star: Connection) -> InducedObjects:
        site = probe.site
        return cls(
            probe,
            Induced.compute(probe, d.coefficients(site)),
            Induced.compute(probe, d_star.coefficients(site)),
        )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_hypersurface(
    hypersurface: Hypersurface,
    sd: ScreenDecomposition,
    g: Metric,
    sites: Sequence[Site],
    *,
    tangency: float = 1e-8,
    null: float = 1e-10,
    degeneracy: float = DEFAULT_DEGENERACY,
) -> None:
    """Raise :class:`BootstrapValidationError` at the first violated frame condition."""

    def check(name: str, site: Site, residual: float, limit: float) -> None:
        if not residual < limit:
            raise BootstrapValidationError(name, site.point, float(residual))

    for site in sites:
        gval = _metric_value(site, g)
        frame = hypersurface.frame_matrix(site)
        xi = site.jet(sd.xi).value
        n_vec = site.jet(sd.transversal).value
        screen = family(site, sd.screen).value if sd.screen else np.zeros((len(xi), 0))
        tangent = [frame, xi[:, None], screen]
        if hypersurface.nu is not None:
            tangent.append(site.jet(hypersurface.nu).value[:, None])
        check(
            "tangency",
            site,
            float(site.tangency_residual(np.concatenate(tangent, axis=1)).max()),
            tangency,
        )
        smallest = float(scipy.linalg.svdvals(frame)[-1])
        if not smallest > tangency:
            raise BootstrapValidationError("frame independence", site.point, smallest)
        check("g(xi,xi)", site, abs(inner(gval, xi, xi)), null)
        check("g(N,N)", site, abs(inner(gval, n_vec, n_vec)), null)
        check("g(xi,N)-1", site, abs(inner(gval, xi, n_vec) - 1.0), null)
        if screen.shape[1]:
            check("g(xi,W)", site, float(np.abs(inner(gval, xi, screen)).max()), null)
            check("g(N,W)", site, float(np.abs(inner(gval, n_vec, screen)).max()), null)
            det = abs(float(np.linalg.det(screen.T @ gval @ screen)))
            if not det > degeneracy:
                raise BootstrapValidationError("screen Gram determinant", site.point, det)
        check("g(xi,frame)", site, float(np.abs(inner(gval, xi, frame)).max()), null)
    logger.debug("validated hypersurface frames at %d points", len(sites))


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

_SECTION2_ROWS = {
    "induced-metric": "(nabla_X g)(Y,Z) - B(X,Y) theta(Z) - B(X,Z) theta(Y) = 0",
    "shape-xi-screen": "g(A*_xi X, PY) - B(X,PY) = 0",
    "b-xi": "B(X,xi) = 0",
    "shape-xi-transversal": "g(A*_xi X, N) = -theta(nabla_X xi) - tau(X) = 0",
    "shape-transversal-null": "g(A_N X, N) = 0",
    "shape-xi-xi": "A*_xi xi = 0",
}

_FRAME_ROWS = {
    "xi-null": "g(xi,xi) = 0",
    "xi-radical": "g(xi,X) = 0",
    "xi-transversal": "g(xi,N) - 1 = 0",
    "transversal-null": "g(N,N) = 0",
    "transversal-screen": "g(N,W) = 0",
    "tangency": "xi and screen fields are tangent",
    "radical-collinearity": "sin angle(radical generator, xi) = 0",
    "transversal-match": "solved N - declared N = 0",
}


def _declare_section2(result: SuiteResult, prefix: str, kind: str) -> None:
    for key, identity in _SECTION2_ROWS.items():
        result.declare(f"{prefix}.{key}", identity, kind)


def _record_section2(result: SuiteResult, prefix: str, probe: Probe, induced: Induced) -> None:
    point = probe.site.point
    theta = probe.theta
    xgyz = probe.derivative_of_inner()
    gauss_terms = induced.b[:, :, None] * theta[None, None, :] + induced.b[:, None, :] * theta[None, :, None]
    result.record(
        f"{prefix}.induced-metric", point, probe.metric_derivative(xgyz, induced.tangent) - gauss_terms
    )
    star_xi = induced.shape_xi_with_tau(probe.xi.value)
    result.record(
        f"{prefix}.shape-xi-screen",
        point,
        probe.pair(star_xi, probe.projected.value) - induced.b_projected,
    )
    result.record(f"{prefix}.b-xi", point, induced.b_xi)
    result.record(
        f"{prefix}.shape-xi-transversal", point, probe.pair(star_xi, probe.transversal.value)
    )
    result.record(
        f"{prefix}.shape-transversal-null", point, probe.pair(induced.shape, probe.transversal.value)
    )
    result.record(f"{prefix}.shape-xi-xi", point, star_xi[:, 0])


def _record_frame(
    result: SuiteResult,
    fixture: Fixture,
    probe: Probe,
    degeneracy: float,
) -> None:
    site = probe.site
    point = site.point
    xi, n_vec = probe.xi.value, probe.transversal.value
    screen = probe.screen.value
    prefix = "section2.frame"
    result.record(f"{prefix}.xi-null", point, probe.pair(xi, xi))
    result.record(f"{prefix}.xi-radical", point, probe.pair(xi, probe.fields.value))
    result.record(f"{prefix}.xi-transversal", point, probe.pair(xi, n_vec) - 1.0)
    result.record(f"{prefix}.transversal-null", point, probe.pair(n_vec, n_vec))
    result.record(f"{prefix}.transversal-screen", point, probe.pair(n_vec, screen))
    result.record(
        f"{prefix}.tangency",
        point,
        site.tangency_residual(np.concatenate([xi[:, None], screen], axis=1)),
    )
    generator = radical(fixture.hypersurface, fixture.metric, site, degeneracy=degeneracy)
    result.record(f"{prefix}.radical-collinearity", point, sine_residual(generator, xi))
    solved = solve_transversal(fixture.metric, xi, screen, site, degeneracy=degeneracy)
    result.record(f"{prefix}.transversal-match", point, solved - n_vec)


def suite_section2(
    fixture: Fixture,
    sites: Sequence[Site],
    *,
    random_fields: int = 2,
    seed: int = 42,
    degeneracy: float = DEFAULT_DEGENERACY,
) -> SuiteResult:
    """Null-frame rows and the Levi-Civita induced identities.

    The same identities are repeated as report rows for the fixture's
    connection and its dual.
    """
    g = fixture.metric
    lc = levi_civita(g, degeneracy)
    connections = [
        ("section2.levi-civita", lc, IDENTITY),
        (f"section2.{label(fixture.connection.name)}", fixture.connection, REPORT),
        (f"section2.{label(fixture.dual.name)}", fixture.dual, REPORT),
    ]
    result = SuiteResult("section2")
    for key, identity in _FRAME_ROWS.items():
        result.declare(f"section2.frame.{key}", identity)
    for prefix, _, kind in connections:
        _declare_section2(result, prefix, kind)
    for probe in probes(
        fixture.hypersurface, fixture.screen, g, sites, random_fields=random_fields, seed=seed
    ):
        _record_frame(result, fixture, probe, degeneracy)
        for prefix, connection, _ in connections:
            induced = Induced.compute(probe, connection.coefficients(probe.site))
            _record_section2(result, prefix, probe, induced)
    return result


_SECTION3_ROWS = {
    "induced-duality": "X g(Y,Z) - g(D_X Y,Z) - g(Y,D*_X Z) - B(X,Y) theta(Z) - B*(X,Z) theta(Y) = 0",
    "metric-sum": "(D_X g)(Y,Z) + (D*_X g)(Y,Z) - (B + B*)(X,Y) theta(Z) - (B + B*)(X,Z) theta(Y) = 0",
    "D.torsion": "D_X Y - D_Y X - [X,Y] = 0",
    "D-star.torsion": "D*_X Y - D*_Y X - [X,Y] = 0",
    "B.symmetry": "B(X,Y) - B(Y,X) = 0",
    "B-star.symmetry": "B*(X,Y) - B*(Y,X) = 0",
    "b-xi-sum": "B(X,xi) + B*(X,xi) = 0",
    "transversal-sum": "g(A_N X + A*_N X, N) = 0",
    "screen-form": "C(X,PY) - g(A*_N X, PY) = 0",
    "screen-form-star": "C*(X,PY) - g(A_N X, PY) = 0",
    "shape-xi.printed": "B(X,Y) - g(A*_xi X, Y) - B*(X,xi) theta(Y) = 0",
    "shape-xi": "B(X,Y) - g(A*_xi X, Y) + B*(X,xi) theta(Y) = 0",
    "shape-xi-star.printed": "B*(X,Y) - g(A_xi X, Y) - B(X,xi) theta(Y) = 0",
    "shape-xi-star": "B*(X,Y) - g(A_xi X, Y) + B(X,xi) theta(Y) = 0",
    "radical-sum": "A*_xi xi + A_xi xi = 0",
    "tau-radical": "-theta(D_X xi) - tau*(X) = 0",
    "tau-star-radical": "-theta(D*_X xi) - tau(X) = 0",
    "gauss.tangency": "D_X Y is tangent",
    "gauss-star.tangency": "D*_X Y is tangent",
    "weingarten.tangency": "A_N X and A*_N X are tangent",
}

_SECTION3_REPORTS = {
    "duality-defect": "X g(Y,Z) - g(D_X Y,Z) - g(Y,D*_X Z)",
    "tau-radical.printed": "-theta(D_X xi) - tau(X)",
    "induced-codazzi": "(D_X g)(Y,Z) - (D_Y g)(X,Z)",
    "B.gauge": "|B(X,Y)|",
    "B-star.gauge": "|B*(X,Y)|",
}


def suite_section3(
    fixture: Fixture,
    sites: Sequence[Site],
    *,
    random_fields: int = 2,
    seed: int = 42,
) -> SuiteResult:
    """Induced objects of the dual pair ``(D, D*)`` and the identities linking them."""
    result = SuiteResult("section3")
    for key, identity in _SECTION3_ROWS.items():
        result.declare(f"section3.{key}", identity)
    for key, identity in _SECTION3_REPORTS.items():
        result.declare(f"section3.{key}", identity, REPORT)
    result.declare(
        "section3.B.totally-geodesic",
        "ambient D_X Y - induced D_X Y = 0",
        CONDITIONAL,
        gate="section3.B.gauge",
    )
    result.declare(
        "section3.B-star.totally-geodesic",
        "ambient D*_X Y - induced D*_X Y = 0",
        CONDITIONAL,
        gate="section3.B-star.gauge",
    )
    for probe in probes(
        fixture.hypersurface,
        fixture.screen,
        fixture.metric,
        sites,
        random_fields=random_fields,
        seed=seed,
    ):
        objects = InducedObjects.at(probe, fixture.connection, fixture.dual)
        _record_section3(result, objects)
    return result


def _record_section3(result: SuiteResult, objects: InducedObjects) -> None:
    probe, p, s = objects.probe, objects.primal, objects.dual
    site = probe.site
    point = site.point
    theta = probe.theta
    fv = probe.fields.value
    n_vec = probe.transversal.value

    def rec(key: str, values: object) -> None:
        result.record(f"section3.{key}", point, values)

    xgyz = probe.derivative_of_inner()
    mixed = (
        xgyz
        - np.einsum("kxy,kl,lz->xyz", p.tangent, probe.g, fv)
        - np.einsum("ky,kl,lxz->xyz", fv, probe.g, s.tangent)
    )
    rec("duality-defect", mixed)
    rec(
        "induced-duality",
        mixed - p.b[:, :, None] * theta[None, None, :] - s.b[:, None, :] * theta[None, :, None],
    )
    both = p.b + s.b
    md = probe.metric_derivative(xgyz, p.tangent)
    md_star = probe.metric_derivative(xgyz, s.tangent)
    rec(
        "metric-sum",
        md + md_star - both[:, :, None] * theta[None, None, :] - both[:, None, :] * theta[None, :, None],
    )
    rec("induced-codazzi", md - md.transpose(1, 0, 2))
    bracket = brackets(site, probe.fields, probe.fields)
    rec("D.torsion", p.tangent - p.tangent.transpose(0, 2, 1) - bracket)
    rec("D-star.torsion", s.tangent - s.tangent.transpose(0, 2, 1) - bracket)
    rec("B.symmetry", p.b - p.b.T)
    rec("B-star.symmetry", s.b - s.b.T)
    rec("b-xi-sum", p.b_xi + s.b_xi)
    rec("transversal-sum", probe.pair(p.shape + s.shape, n_vec))
    projected = probe.projected.value
    rec("screen-form", p.screen_form - probe.pair(s.shape, projected))
    rec("screen-form-star", s.screen_form - probe.pair(p.shape, projected))
    along_star = probe.pair(s.shape_xi, fv)
    along = probe.pair(p.shape_xi, fv)
    rec("shape-xi.printed", p.b - along_star - np.multiply.outer(s.b_xi, theta))
    rec("shape-xi", p.b - along_star + np.multiply.outer(s.b_xi, theta))
    rec("shape-xi-star.printed", s.b - along - np.multiply.outer(p.b_xi, theta))
    rec("shape-xi-star", s.b - along + np.multiply.outer(p.b_xi, theta))
    rec("radical-sum", p.shape_xi[:, 0] + s.shape_xi[:, 0])
    rec("tau-radical", -p.theta_radical - s.tau)
    rec("tau-star-radical", -s.theta_radical - p.tau)
    rec("tau-radical.printed", -p.theta_radical - p.tau)
    n = fv.shape[0]
    rec("gauss.tangency", site.tangency_residual(p.tangent.reshape(n, -1)))
    rec("gauss-star.tangency", site.tangency_residual(s.tangent.reshape(n, -1)))
    rec("weingarten.tangency", site.tangency_residual(np.concatenate([p.shape, s.shape], axis=1)))
    rec("B.gauge", p.b)
    rec("B-star.gauge", s.b)
    rec("B.totally-geodesic", p.full - p.tangent)
    rec("B-star.totally-geodesic", s.full - s.tangent)
