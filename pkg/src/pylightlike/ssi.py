"""Screen semi-invariant lightlike hypersurfaces of contact ambients.

With ``U = -phi N`` and ``W = -phi xi`` every tangent field splits as
``phi X = phi_M X + u(X) N`` where ``u(X) = g(X, W)``; ``phi_M`` is the
induced f-structure.  Rows are evaluated over the probe families built by
:func:`pylightlike.lightlike.probes`.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

from .connection import Connection, covariant_derivatives
from .contact import ContactStructure
from .errors import ConfigurationError, NotScreenSemiInvariantError
from .geometry import Metric, Site, as_family, brackets, family
from .jets import Jet, jet_einsum, stack
from .lightlike import Hypersurface, Induced, Probe, ScreenDecomposition, probes
from .report import CONDITIONAL, PATTERN, REPORT, SuiteResult

if TYPE_CHECKING:
    from .fixtures.format import Fixture

logger = logging.getLogger(__name__)

__all__ = [
    "SSIFrame",
    "SSIStructure",
    "build_ssi",
    "f_structure_suite",
    "integrability_suite",
    "lemma52_53_suite",
    "parallel_and_geodesic_report",
    "prop51_suite",
]

SEMI_INVARIANCE_TOLERANCE = 1e-8


@dataclass(eq=False)
class SSIFrame:
    """``U``, ``W``, ``u``, ``w`` and the induced ``phi`` over one probe family."""

    probe: Probe
    phi: Jet
    nu: Jet
    eta: np.ndarray
    big_u: Jet
    big_w: Jet
    u: Jet
    w: np.ndarray
    g_nu: np.ndarray
    phi_fields: Jet
    tangent_frame: np.ndarray
    primal: Induced
    dual: Induced

    @classmethod
    def at(cls, probe: Probe, ssi: SSIStructure) -> SSIFrame:
        site = probe.site
        phi = site.jet(ssi.contact.phi)
        big_u = -jet_einsum("kl,l->k", phi, probe.transversal)
        big_w = -jet_einsum("kl,l->k", phi, probe.xi)
        u = jet_einsum("kf,kl,l->f", probe.fields, probe.metric, big_w)
        nu = site.jet(ssi.contact.nu)
        phi_fields = jet_einsum("kl,lf->kf", phi, probe.fields) - jet_einsum(
            "f,k->kf", u, probe.transversal
        )
        return cls(
            probe=probe,
            phi=phi,
            nu=nu,
            eta=site.jet(ssi.contact.eta).value,
            big_u=big_u,
            big_w=big_w,
            u=u,
            w=probe.pair(probe.fields.value, big_u.value),
            g_nu=probe.pair(probe.fields.value, nu.value),
            phi_fields=phi_fields,
            tangent_frame=family(site, ssi.hypersurface.frame).value,
            primal=Induced.compute(probe, ssi.connection.coefficients(site)),
            dual=Induced.compute(probe, ssi.dual.coefficients(site)),
        )

    @property
    def site(self) -> Site:
        return self.probe.site

    def u_of(self, vectors: np.ndarray) -> np.ndarray:
        return self.probe.pair(vectors, self.big_w.value)

    def ambient_phi(self, vectors: np.ndarray) -> np.ndarray:
        return np.tensordot(self.phi.value, vectors, axes=([1], [0]))

    def apply_phi(self, vectors: np.ndarray) -> np.ndarray:
        """Induced ``phi_M v = phi v - u(v) N`` for tangent vectors."""
        return self.ambient_phi(vectors) - np.multiply.outer(
            self.probe.transversal.value, self.u_of(vectors)
        )

    def phi_jet(self, vectors: Jet) -> Jet:
        """Induced ``phi_M`` applied to a family of tangent fields, as a jet."""
        u = jet_einsum("kf,kl,l->f", vectors, self.probe.metric, self.big_w)
        return jet_einsum("kl,lf->kf", self.phi, vectors) - jet_einsum(
            "f,k->kf", u, self.probe.transversal
        )

    def tangent_part(self, vectors: np.ndarray) -> np.ndarray:
        """Drop the ``N`` component: ``v - g(v, xi) N``."""
        return vectors - np.multiply.outer(
            self.probe.transversal.value, self.probe.pair(vectors, self.probe.xi.value)
        )

    def screen_part(self, vectors: np.ndarray) -> np.ndarray:
        """Screen projection of tangent vectors: ``v - theta(v) xi``."""
        return vectors - np.multiply.outer(
            self.probe.xi.value, self.probe.pair(vectors, self.probe.transversal.value)
        )

    def l_family(self) -> Jet:
        """Family fields projected onto ``L``: ``X - u(X) U - g(X, nu) nu``."""
        fields = self.probe.fields
        g_nu = jet_einsum("kf,kl,l->f", fields, self.probe.metric, self.nu)
        return (
            fields
            - jet_einsum("f,k->kf", self.u, self.big_u)
            - jet_einsum("f,k->kf", g_nu, self.nu)
        )

    def l0_basis(self) -> np.ndarray:
        """Ambient columns spanning ``L0``: tangent, screen and orthogonal to ``W, U, nu``."""
        probe = self.probe
        frame = self.tangent_frame
        constraints = np.vstack(
            [
                probe.pair(frame, probe.transversal.value),
                probe.pair(frame, self.big_w.value),
                probe.pair(frame, self.big_u.value),
                probe.pair(frame, self.nu.value),
            ]
        )
        return frame @ scipy.linalg.null_space(constraints)


@dataclass(eq=False)
class SSIStructure:
    contact: ContactStructure
    metric: Metric
    hypersurface: Hypersurface
    screen: ScreenDecomposition
    connection: Connection
    dual: Connection
    frames: list[SSIFrame] = field(default_factory=list)

    @property
    def probes(self) -> list[Probe]:
        return [f.probe for f in self.frames]


def build_ssi(
    fixture: Fixture,
    sites: Sequence[Site],
    *,
    random_fields: int = 2,
    seed: int = 42,
    tol: float = SEMI_INVARIANCE_TOLERANCE,
) -> SSIStructure:
    """Construct ``U, W, u, w`` and the induced ``phi`` at every site.

    Raises :class:`NotScreenSemiInvariantError` when ``phi xi`` or ``phi N``
    leaves the screen, when ``nu`` is not tangent and orthogonal to the null
    frame, or when ``L0`` is not ``phi``-invariant.
    """
    if fixture.contact is None or fixture.hypersurface is None or fixture.screen is None:
        raise ConfigurationError(
            f"fixture {fixture.name!r} has no contact structure with a lightlike hypersurface"
        )
    ssi = SSIStructure(
        contact=fixture.contact,
        metric=fixture.metric,
        hypersurface=fixture.hypersurface,
        screen=fixture.screen,
        connection=fixture.connection,
        dual=fixture.dual,
    )
    for probe in probes(
        ssi.hypersurface, ssi.screen, ssi.metric, sites, random_fields=random_fields, seed=seed
    ):
        frame = SSIFrame.at(probe, ssi)
        for check, residual in _structure_residuals(frame).items():
            worst = float(np.abs(residual).max()) if np.size(residual) else 0.0
            if not worst < tol:
                raise NotScreenSemiInvariantError(
                    f"{check} residual {worst:.3e} at {tuple(probe.site.point.tolist())}"
                )
        ssi.frames.append(frame)
    logger.debug("built screen semi-invariant structure at %d points", len(ssi.frames))
    return ssi


def _structure_residuals(frame: SSIFrame) -> dict[str, np.ndarray]:
    probe = frame.probe
    site = probe.site
    xi, n_vec = probe.xi.value, probe.transversal.value
    phi_null = np.stack([frame.ambient_phi(xi), frame.ambient_phi(n_vec)], axis=1)
    l0 = frame.l0_basis()
    phi_l0 = frame.ambient_phi(l0)
    return {
        "u-w-pairing": np.atleast_1d(probe.pair(frame.big_u.value, frame.big_w.value) - 1.0),
        "nu-tangency": site.tangency_residual(frame.nu.value[:, None]),
        "nu-null-frame": np.array([probe.pair(xi, frame.nu.value), probe.pair(n_vec, frame.nu.value)]),
        "semi-invariance": np.concatenate(
            [site.tangency_residual(phi_null), probe.pair(phi_null, n_vec)]
        ),
        "l0-invariance": np.concatenate(
            [
                site.tangency_residual(phi_l0) if l0.shape[1] else np.zeros(0),
                probe.pair(phi_l0, n_vec),
                frame.u_of(phi_l0),
                probe.pair(phi_l0, frame.big_u.value),
                probe.pair(phi_l0, frame.nu.value),
            ]
        ),
    }


# ---------------------------------------------------------------------------
# f-structure
# ---------------------------------------------------------------------------

_STRUCTURE_ROWS = {
    "u-w-pairing": "g(U,W) - 1 = 0",
    "nu-tangency": "nu is tangent",
    "nu-null-frame": "g(xi,nu) = g(N,nu) = 0",
    "semi-invariance": "phi xi and phi N lie in the screen",
    "l0-invariance": "phi L0 lies in L0",
}

_F_STRUCTURE_ROWS = {
    "reassembly": "phi X - phi_M X - u(X) N = 0",
    "phi-squared": "phi_M^2 X + X - g(X,nu) nu - u(X) U = 0",
    "phi-cubed": "phi_M^3 X + phi_M X = 0",
    "phi-nu": "phi_M nu = 0",
    "metric": "g(phi_M X, phi_M Y) - g(X,Y) + g(X,nu) g(Y,nu) + u(X) w(Y) + u(Y) w(X) = 0",
    "projection": "u(P X) = g(P X, nu) = 0 for P X = X - u(X) U - g(X,nu) nu",
}

_F_STRUCTURE_REPORTS = {
    "almost-contact-defect": "phi_M^2 X + X - g(X,nu) nu",
    "adjoint.printed": "g(phi_M X, Y) - g(X, phi_M Y) + u(X) eta(Y) + u(Y) eta(X)",
}


def f_structure_suite(ssi: SSIStructure) -> SuiteResult:
    result = SuiteResult("ssi")
    for key, identity in _STRUCTURE_ROWS.items():
        result.declare(f"ssi.structure.{key}", identity)
    for key, identity in _F_STRUCTURE_ROWS.items():
        result.declare(f"ssi.f-structure.{key}", identity)
    for key, identity in _F_STRUCTURE_REPORTS.items():
        result.declare(f"ssi.f-structure.{key}", identity, REPORT)
    for frame in ssi.frames:
        for key, residual in _structure_residuals(frame).items():
            result.record(f"ssi.structure.{key}", frame.site.point, residual)
        _record_f_structure(result, frame)
    return result


def _record_f_structure(result: SuiteResult, frame: SSIFrame) -> None:
    probe = frame.probe
    point = probe.site.point
    fv = probe.fields.value
    n_vec = probe.transversal.value
    nu = frame.nu.value
    u = frame.u.value
    phi_x = frame.phi_fields.value
    phi2_x = frame.apply_phi(phi_x)
    contact_defect = phi2_x + fv - np.multiply.outer(nu, frame.g_nu)
    projected = fv - np.multiply.outer(frame.big_u.value, u) - np.multiply.outer(nu, frame.g_nu)
    eta_x = frame.eta @ fv

    def rec(key: str, values: object) -> None:
        result.record(f"ssi.f-structure.{key}", point, values)

    rec("reassembly", frame.ambient_phi(fv) - phi_x - np.multiply.outer(n_vec, u))
    rec("phi-squared", contact_defect - np.multiply.outer(frame.big_u.value, u))
    rec("phi-cubed", frame.apply_phi(phi2_x) + phi_x)
    rec("phi-nu", frame.apply_phi(nu))
    rec(
        "metric",
        probe.pair(phi_x, phi_x)
        - probe.pair(fv, fv)
        + np.multiply.outer(frame.g_nu, frame.g_nu)
        + np.multiply.outer(u, frame.w)
        + np.multiply.outer(frame.w, u),
    )
    rec("projection", np.stack([frame.u_of(projected), probe.pair(projected, nu)]))
    rec("almost-contact-defect", contact_defect)
    rec(
        "adjoint.printed",
        probe.pair(phi_x, fv)
        - probe.pair(fv, phi_x)
        + np.multiply.outer(u, eta_x)
        + np.multiply.outer(eta_x, u),
    )


# ---------------------------------------------------------------------------
# Null frame identities
# ---------------------------------------------------------------------------


def _second_forms_with_nu(frame: SSIFrame, connection: Connection) -> np.ndarray:
    """``[B(xi, nu), B(nu, nu)]`` for *connection*."""
    probe = frame.probe
    directions = np.stack([probe.xi.value, frame.nu.value], axis=1)
    full = covariant_derivatives(
        connection.coefficients(probe.site), probe.site, directions, as_family(frame.nu)[0]
    )[:, :, 0]
    return probe.pair(full, probe.xi.value)


def prop51_suite(ssi: SSIStructure) -> SuiteResult:
    """Null-frame identities of a hypersurface tangent to ``nu``."""
    result = SuiteResult("ssi")
    rows = {
        "phi-xi-xi": "g(phi xi, xi) = 0",
        "phi-xi-transversal": "g(phi xi, N) + g(A*_N xi, nu) = 0",
        "phi-xi-phi-transversal": "g(phi xi, phi N) - 1 = 0",
        "B.xi-nu": "B(xi,nu) = 0",
        "B.nu-nu": "B(nu,nu) = 0",
        "B-star.xi-nu": "B*(xi,nu) = 0",
        "B-star.nu-nu": "B*(nu,nu) = 0",
    }
    for key, identity in rows.items():
        result.declare(f"ssi.null-frame.{key}", identity)
    for frame in ssi.frames:
        probe = frame.probe
        point = probe.site.point
        xi, n_vec = probe.xi.value, probe.transversal.value
        phi_xi = frame.ambient_phi(xi)
        b = _second_forms_with_nu(frame, ssi.connection)
        b_star = _second_forms_with_nu(frame, ssi.dual)
        result.record("ssi.null-frame.phi-xi-xi", point, probe.pair(phi_xi, xi))
        result.record(
            "ssi.null-frame.phi-xi-transversal",
            point,
            probe.pair(phi_xi, n_vec) + probe.pair(frame.dual.shape[:, 0], frame.nu.value),
        )
        result.record(
            "ssi.null-frame.phi-xi-phi-transversal",
            point,
            probe.pair(phi_xi, frame.ambient_phi(n_vec)) - 1.0,
        )
        result.record("ssi.null-frame.B.xi-nu", point, b[0])
        result.record("ssi.null-frame.B.nu-nu", point, b[1])
        result.record("ssi.null-frame.B-star.xi-nu", point, b_star[0])
        result.record("ssi.null-frame.B-star.nu-nu", point, b_star[1])
    return result


# ---------------------------------------------------------------------------
# Structure equations
# ---------------------------------------------------------------------------


def _induced_along(frame: SSIFrame, gamma: np.ndarray, y: Jet) -> tuple[np.ndarray, np.ndarray]:
    """Induced ``D_X Y`` and ``B(X, Y)`` for the probe family ``X`` and a family *y*."""
    probe = frame.probe
    full = probe.derivatives(gamma, y)
    b = probe.pair(full, probe.xi.value)
    return full - np.multiply.outer(probe.transversal.value, b), b


def _lemma_rows(
    frame: SSIFrame,
    gamma: np.ndarray,
    other: Induced,
    own: Induced,
) -> tuple[np.ndarray, np.ndarray]:
    """Tangential and transversal parts of ``D_X phi Y - phi D'_X Y - g(X,Y) nu + g(Y,nu) X``.

    *own* carries ``A_N`` and ``tau`` of the differentiating connection;
    *other* carries ``D'`` and ``B'`` of its dual.
    """
    probe = frame.probe
    fv = probe.fields.value
    u = frame.u.value
    d_phi, b_phi = _induced_along(frame, gamma, frame.phi_fields)
    tangential = (
        d_phi
        - frame.apply_phi(other.tangent)
        - np.einsum("y,kx->kxy", u, own.shape)
        + np.einsum("xy,k->kxy", other.b, frame.big_u.value)
        - np.einsum("xy,k->kxy", probe.pair(fv, fv), frame.nu.value)
        + np.einsum("y,kx->kxy", frame.g_nu, fv)
    )
    x_of_u = np.moveaxis(frame.u.derivative(probe.site.lift(fv)), -1, 0)
    transversal = x_of_u - frame.u_of(other.tangent) + b_phi + np.multiply.outer(own.tau, u)
    return tangential, transversal


def lemma52_53_suite(ssi: SSIStructure) -> SuiteResult:
    """Tangential and transversal parts of the structure equation for ``phi_M``."""
    result = SuiteResult("ssi")
    rows = {
        "tangential": "D_X phi Y - phi D*_X Y - u(Y) A_N X + B*(X,Y) U - g(X,Y) nu + g(nu,Y) X = 0",
        "transversal": "X(u(Y)) - u(D*_X Y) + B(X, phi Y) + u(Y) tau(X) = 0",
        "tangential-star": "D*_X phi Y - phi D_X Y - u(Y) A*_N X + B(X,Y) U - g(X,Y) nu + g(nu,Y) X = 0",
        "transversal-star": "X(u(Y)) - u(D_X Y) + B*(X, phi Y) + u(Y) tau*(X) = 0",
    }
    for key, identity in rows.items():
        result.declare(f"ssi.lemma.{key}", identity)
    for frame in ssi.frames:
        site = frame.site
        tangential, transversal = _lemma_rows(
            frame, ssi.connection.coefficients(site), frame.dual, frame.primal
        )
        tangential_star, transversal_star = _lemma_rows(
            frame, ssi.dual.coefficients(site), frame.primal, frame.dual
        )
        result.record("ssi.lemma.tangential", site.point, tangential)
        result.record("ssi.lemma.transversal", site.point, transversal)
        result.record("ssi.lemma.tangential-star", site.point, tangential_star)
        result.record("ssi.lemma.transversal-star", site.point, transversal_star)
    return result


# ---------------------------------------------------------------------------
# Parallel fields and totally geodesic characterizations
# ---------------------------------------------------------------------------


def _component_rest(frame: SSIFrame, vectors: np.ndarray) -> np.ndarray:
    """``v - g(v, nu) nu - u(v) U``."""
    return (
        vectors
        - np.multiply.outer(frame.nu.value, frame.probe.pair(vectors, frame.nu.value))
        - np.multiply.outer(frame.big_u.value, frame.u_of(vectors))
    )


def parallel_and_geodesic_report(ssi: SSIStructure) -> SuiteResult:
    """Parallelism gauges for ``U`` and ``W`` and the conclusions they unlock.

    Conclusions are conditional rows: they are judged only where the gauge
    their derivation needs is below the tolerance.
    """
    result = SuiteResult("ssi")
    gauges = {}
    for vector in ("U", "W"):
        for conn in ("D", "D-star", "screen", "screen-star"):
            gid = f"ssi.parallel.{vector}.{conn}-gauge"
            symbol = {"D": "D", "D-star": "D*", "screen": "nabla", "screen-star": "nabla*"}[conn]
            result.declare(gid, f"|{symbol}_X {vector}|", REPORT)
            gauges[(vector, conn)] = gid
    result.declare("ssi.geodesic.B-gauge", "|B(X,Y)|", REPORT)
    result.declare("ssi.geodesic.B-star-gauge", "|B*(X,Y)|", REPORT)

    conditional = {
        "ssi.parallel.U.transversal-shape": (
            "A_N X - u(A_N X) U - g(A_N X,nu) nu = 0",
            gauges[("U", "D-star")],
        ),
        "ssi.parallel.U.tau": ("tau(X) = 0", gauges[("U", "D-star")]),
        "ssi.parallel.U.transversal-shape-star": (
            "A*_N X - u(A*_N X) U - g(A*_N X,nu) nu = 0",
            gauges[("U", "D")],
        ),
        "ssi.parallel.U.tau-star": ("tau*(X) = 0", gauges[("U", "D")]),
        "ssi.parallel.W.radical-shape-star": (
            "A*_xi X - g(A*_xi X,nu) nu - u(A*_xi X) U = 0",
            gauges[("W", "D")],
        ),
        "ssi.parallel.W.tau": ("tau(X) = 0", gauges[("W", "D")]),
        "ssi.parallel.W.radical-shape": (
            "A_xi X - g(A_xi X,nu) nu - u(A_xi X) U = 0",
            gauges[("W", "D-star")],
        ),
        "ssi.parallel.W.tau-star": ("tau*(X) = 0", gauges[("W", "D-star")]),
        "ssi.geodesic.phi-L": ("D_X phi Y - phi D*_X Y - g(X,Y) nu = 0, Y in L", "ssi.geodesic.B-star-gauge"),
        "ssi.geodesic.phi-L-star": ("D*_X phi Y - phi D_X Y - g(X,Y) nu = 0, Y in L", "ssi.geodesic.B-gauge"),
        "ssi.geodesic.transversal-shape": (
            "A_N X + phi D*_X U + g(X,U) nu = 0",
            "ssi.geodesic.B-star-gauge",
        ),
        "ssi.geodesic.transversal-shape-star": (
            "A*_N X + phi D_X U + g(X,U) nu = 0",
            "ssi.geodesic.B-gauge",
        ),
    }
    for cid, (identity, gate) in conditional.items():
        result.declare(cid, identity, CONDITIONAL, gate=gate)

    for frame in ssi.frames:
        probe = frame.probe
        site = probe.site
        point = site.point
        gamma = ssi.connection.coefficients(site)
        gamma_star = ssi.dual.coefficients(site)
        p, s = frame.primal, frame.dual
        induced = {"D": gamma, "D-star": gamma_star}
        along: dict[tuple[str, str], np.ndarray] = {}
        for vector, jet in (("U", frame.big_u), ("W", frame.big_w)):
            for conn, coefficients in induced.items():
                tangent = frame.tangent_part(probe.derivatives(coefficients, jet))
                along[(vector, conn)] = tangent
                result.record(gauges[(vector, conn)], point, tangent)
                screen = "screen" if conn == "D" else "screen-star"
                result.record(gauges[(vector, screen)], point, frame.screen_part(tangent))
        result.record("ssi.geodesic.B-gauge", point, p.b)
        result.record("ssi.geodesic.B-star-gauge", point, s.b)

        result.record("ssi.parallel.U.transversal-shape", point, _component_rest(frame, p.shape))
        result.record("ssi.parallel.U.tau", point, p.tau)
        result.record("ssi.parallel.U.transversal-shape-star", point, _component_rest(frame, s.shape))
        result.record("ssi.parallel.U.tau-star", point, s.tau)
        result.record("ssi.parallel.W.radical-shape-star", point, _component_rest(frame, s.shape_xi))
        result.record("ssi.parallel.W.tau", point, p.tau)
        result.record("ssi.parallel.W.radical-shape", point, _component_rest(frame, p.shape_xi))
        result.record("ssi.parallel.W.tau-star", point, s.tau)

        l_fields = frame.l_family()
        phi_l = frame.phi_jet(l_fields)
        g_xl = probe.pair(probe.fields.value, l_fields.value)
        nu = frame.nu.value
        for cid, own, other in (
            ("ssi.geodesic.phi-L", gamma, gamma_star),
            ("ssi.geodesic.phi-L-star", gamma_star, gamma),
        ):
            d_phi, _ = _induced_along(frame, own, phi_l)
            d_other, _ = _induced_along(frame, other, l_fields)
            result.record(
                cid,
                point,
                d_phi - frame.apply_phi(d_other) - np.einsum("xy,k->kxy", g_xl, nu),
            )
        w_nu = np.multiply.outer(nu, frame.w)
        result.record(
            "ssi.geodesic.transversal-shape",
            point,
            p.shape + frame.apply_phi(along[("U", "D-star")]) + w_nu,
        )
        result.record(
            "ssi.geodesic.transversal-shape-star",
            point,
            s.shape + frame.apply_phi(along[("U", "D")]) + w_nu,
        )
    return result


# ---------------------------------------------------------------------------
# Integrability
# ---------------------------------------------------------------------------


def _second_form_tensor(frame: SSIFrame, gamma_dual: np.ndarray, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``B(X_x, V_v) = -g(V, D'_X xi)`` with ``D'`` the dual of the form's connection."""
    probe = frame.probe
    d_xi = covariant_derivatives(gamma_dual, probe.site, x, as_family(probe.xi)[0])[:, :, 0]
    return -probe.pair(d_xi, v)


def integrability_suite(ssi: SSIStructure, tol: float) -> SuiteResult:
    """Pointwise integrability of ``L + <nu>`` and ``L' + <nu>``.

    Pattern rows count field pairs on which exactly one side vanishes; they
    are the judged rows.  The value differences are kept as report rows.
    """
    result = SuiteResult("ssi")
    prefix = "ssi.integrability"
    result.declare(f"{prefix}.L.torsion", "u([X,Y]) - u(D_X Y) + u(D_Y X) = 0")
    result.declare(f"{prefix}.L.identity-B", "u([X,Y]) - B(X, phi Y) + B(Y, phi X) = 0", REPORT)
    result.declare(f"{prefix}.L.identity-B-star", "u([X,Y]) - B*(X, phi Y) + B*(Y, phi X) = 0", REPORT)
    result.declare(f"{prefix}.L.pattern-B", "u([X,Y]) = 0 iff B(X, phi Y) = B(Y, phi X)", PATTERN)
    result.declare(
        f"{prefix}.L.pattern-B-star", "u([X,Y]) = 0 iff B*(X, phi Y) = B*(Y, phi X)", PATTERN
    )
    lp = f"{prefix}.L-prime"
    rhs_text = "A_(phi Y) X - A_(phi X) Y - g(Y,nu) X + g(X,nu) Y"
    result.declare(f"{lp}.identity", f"phi[X,Y] + {rhs_text} = 0", REPORT)
    result.declare(f"{lp}.identity-star", f"phi[X,Y] + {rhs_text.replace('A_', 'A*_')} = 0", REPORT)
    result.declare(f"{lp}.pattern", f"phi[X,Y] = 0 iff {rhs_text} = 0", PATTERN)
    result.declare(
        f"{lp}.pattern-star", f"phi[X,Y] = 0 iff {rhs_text.replace('A_', 'A*_')} = 0", PATTERN
    )

    for frame in ssi.frames:
        probe = frame.probe
        site = probe.site
        point = site.point
        gamma = ssi.connection.coefficients(site)
        gamma_star = ssi.dual.coefficients(site)

        # L + <nu>: fields with u = 0
        fields = probe.fields - jet_einsum("f,k->kf", frame.u, frame.big_u)
        fv = fields.value
        u_bracket = frame.u_of(brackets(site, fields, fields))
        phi_v = frame.apply_phi(fv)
        b = _second_form_tensor(frame, gamma_star, fv, phi_v)
        b_star = _second_form_tensor(frame, gamma, fv, phi_v)
        b_diff = b - b.T
        b_star_diff = b_star - b_star.T
        d_xy = frame.tangent_part(covariant_derivatives(gamma, site, fv, fields))
        u_d = frame.u_of(d_xy)
        result.record(f"{prefix}.L.torsion", point, u_bracket - u_d + u_d.T)
        result.record(f"{prefix}.L.identity-B", point, u_bracket - b_diff)
        result.record(f"{prefix}.L.identity-B-star", point, u_bracket - b_star_diff)
        result.record_pattern(f"{prefix}.L.pattern-B", point, np.abs(u_bracket), np.abs(b_diff), tol)
        result.record_pattern(
            f"{prefix}.L.pattern-B-star", point, np.abs(u_bracket), np.abs(b_star_diff), tol
        )

        # L' + <nu>: spanned by U and nu
        pair = stack([frame.big_u, frame.nu])
        pv = pair.value
        g_nu = probe.pair(pv, frame.nu.value)
        phi_bracket = frame.apply_phi(brackets(site, pair, pair))
        phi_pair = jet_einsum("kl,lf->kf", frame.phi, pair)
        lhs_norm = np.linalg.norm(phi_bracket, axis=0)
        metric_terms = -np.einsum("y,kx->kxy", g_nu, pv) + np.einsum("x,ky->kxy", g_nu, pv)
        for suffix, coefficients in (("", gamma), ("-star", gamma_star)):
            # shape[k, y, x] = A_(phi X_x) Y_y
            shape = -frame.tangent_part(covariant_derivatives(coefficients, site, pv, phi_pair))
            rhs = shape - shape.transpose(0, 2, 1) + metric_terms
            result.record(f"{lp}.identity{suffix}", point, phi_bracket + rhs)
            result.record_pattern(
                f"{lp}.pattern{suffix}", point, lhs_norm, np.linalg.norm(rhs, axis=0), tol
            )
    return result
