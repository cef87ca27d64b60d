"""Affine connections given by Christoffel coefficients.

Coefficients are arrays ``gamma[k, i, j]`` with
``(D_X Y)^k = X^i d_i Y^k + gamma^k_ij X^i Y^j``.  Metric derivatives are
stored as ``dg[i, j, l] = d_l g_ij``.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence

import numpy as np

from .errors import SingularMetricError
from .geometry import Metric, Site, TensorField, as_family, as_jet, brackets
from .jets import Jet
from .report import REPORT, SuiteResult

logger = logging.getLogger(__name__)

__all__ = [
    "ChristoffelConnection",
    "Connection",
    "DifferenceTensor",
    "DualConnection",
    "LeviCivita",
    "ReflectedConnection",
    "ShiftedConnection",
    "connection_from_K",
    "connection_suite",
    "covariant_derivative",
    "covariant_derivatives",
    "difference_tensor",
    "dual_connection",
    "duality_defect",
    "is_statistical",
    "levi_civita",
    "mean_connection_check",
    "metric_defect",
    "metric_derivative",
    "torsion",
]

DEFAULT_DEGENERACY = 1e-10


def _metric_at(site: Site, metric: Metric, degeneracy: float) -> tuple[np.ndarray, np.ndarray]:
    jet = site.ambient_jet(metric)
    det = float(np.linalg.det(jet.value))
    if abs(det) < degeneracy:
        raise SingularMetricError(
            f"|det g| = {abs(det):.3e} below {degeneracy:.1e} at {tuple(site.image.tolist())}"
        )
    return jet.value, jet.grad


# ---------------------------------------------------------------------------
# Connections
# ---------------------------------------------------------------------------


class Connection(ABC):
    """A connection evaluated pointwise on the ambient chart."""

    name = "connection"

    @abstractmethod
    def evaluate(self, site: Site) -> np.ndarray:
        """Coefficients at ``site.image``; use :meth:`coefficients` for the cached value."""

    def coefficients(self, site: Site) -> np.ndarray:
        return site.coefficients(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class ChristoffelConnection(Connection):
    def __init__(self, gamma: TensorField, name: str = "D") -> None:
        n = gamma.chart.dimension
        if gamma.shape != (n, n, n):
            raise ValueError(f"Christoffel array must have shape {(n, n, n)}, got {gamma.shape}")
        self.gamma = gamma
        self.name = name

    def evaluate(self, site: Site) -> np.ndarray:
        return site.ambient_jet(self.gamma).value


class LeviCivita(Connection):
    """Koszul formula evaluated numerically at each point."""

    def __init__(
        self, metric: Metric, name: str = "levi-civita", degeneracy: float = DEFAULT_DEGENERACY
    ) -> None:
        self.metric = metric
        self.name = name
        self.degeneracy = degeneracy

    def evaluate(self, site: Site) -> np.ndarray:
        g, dg = _metric_at(site, self.metric, self.degeneracy)
        n = g.shape[0]
        # lowered[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
        lowered = 0.5 * (
            np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
        )
        return np.linalg.solve(g, lowered.reshape(n, n * n)).reshape(n, n, n)


class DualConnection(Connection):
    """Solves ``g_jl G*^l_ik = d_i g_jk - G^l_ij g_lk`` for the dual coefficients."""

    def __init__(
        self,
        base: Connection,
        metric: Metric,
        name: str | None = None,
        degeneracy: float = DEFAULT_DEGENERACY,
    ) -> None:
        self.base = base
        self.metric = metric
        self.name = name or f"{base.name}*"
        self.degeneracy = degeneracy

    def evaluate(self, site: Site) -> np.ndarray:
        g, dg = _metric_at(site, self.metric, self.degeneracy)
        gamma = self.base.coefficients(site)
        n = g.shape[0]
        rhs = np.einsum("jki->jik", dg) - np.einsum("lij,lk->jik", gamma, g)
        return np.linalg.solve(g, rhs.reshape(n, n * n)).reshape(n, n, n)


class ShiftedConnection(Connection):
    """``base + K``."""

    def __init__(self, base: Connection, difference: DifferenceTensor, name: str = "D") -> None:
        self.base = base
        self.difference = difference
        self.name = name

    def evaluate(self, site: Site) -> np.ndarray:
        return self.base.coefficients(site) + self.difference.values(site)


class ReflectedConnection(Connection):
    """``2 * pivot - base``: the reflection of *base* through *pivot*."""

    def __init__(self, base: Connection, pivot: Connection, name: str = "reflected") -> None:
        self.base = base
        self.pivot = pivot
        self.name = name

    def evaluate(self, site: Site) -> np.ndarray:
        return 2.0 * self.pivot.coefficients(site) - self.base.coefficients(site)


def label(name: str) -> str:
    """Check-id form of a connection name (``D*`` becomes ``D-star``)."""
    return name.replace("*", "-star")


def levi_civita(g: Metric, degeneracy: float = DEFAULT_DEGENERACY) -> LeviCivita:
    return LeviCivita(g, degeneracy=degeneracy)


def dual_connection(
    d: Connection, g: Metric, degeneracy: float = DEFAULT_DEGENERACY
) -> DualConnection:
    return DualConnection(d, g, degeneracy=degeneracy)


# ---------------------------------------------------------------------------
# Difference tensors
# ---------------------------------------------------------------------------


class DifferenceTensor:
    """A (1,2)-tensor ``K[k, i, j] = K^k_ij`` evaluated per site."""

    def __init__(self, evaluate: Callable[[Site], np.ndarray], name: str = "K") -> None:
        self._evaluate = evaluate
        self.name = name

    @classmethod
    def from_field(cls, components: TensorField, name: str = "K") -> DifferenceTensor:
        n = components.chart.dimension
        if components.shape != (n, n, n):
            raise ValueError(f"difference tensor must have shape {(n, n, n)}")
        return cls(lambda site: site.ambient_jet(components).value, name=name)

    def values(self, site: Site) -> np.ndarray:
        return self._evaluate(site)

    def apply(self, site: Site, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """``K(X, Y)`` for ambient vectors."""
        return np.einsum("kij,i,j->k", self.values(site), x, y)

    def symmetry_residual(self, site: Site) -> np.ndarray:
        k = self.values(site)
        return k - k.transpose(0, 2, 1)

    def self_adjoint_residual(self, site: Site, g: np.ndarray) -> np.ndarray:
        """``g(K(X,Y),Z) - g(K(X,Z),Y)`` on coordinate vectors, indexed ``[z, x, y]``."""
        lowered = np.einsum("lk,kij->lij", g, self.values(site))
        return lowered - lowered.transpose(2, 1, 0)


def difference_tensor(d: Connection, g: Metric) -> DifferenceTensor:
    """``K = D - levi_civita(g)``."""
    lc = levi_civita(g)
    return DifferenceTensor(
        lambda site: d.coefficients(site) - lc.coefficients(site), name=f"{d.name}-levi-civita"
    )


def connection_from_K(base: Connection, k: DifferenceTensor) -> ShiftedConnection:  # noqa: N802
    return ShiftedConnection(base, k, name=f"{base.name}+{k.name}")


# ---------------------------------------------------------------------------
# Pointwise operations
# ---------------------------------------------------------------------------


def covariant_derivatives(gamma: np.ndarray, site: Site, x: np.ndarray, y: Jet) -> np.ndarray:
    """``D_{X_f} Y_g`` for families: *x* values ``(n, F)``, *y* a ``(n, G)`` jet.

    Result has shape ``(n, F, G)``.
    """
    xu = site.lift(x)
    return np.einsum("kgm,mf->kfg", y.grad, xu) + np.einsum("kij,if,jg->kfg", gamma, x, y.value)


def covariant_derivative(
    d: Connection, x: TensorField | Jet, y: TensorField | Jet, site: Site
) -> np.ndarray:
    xj, single_x = as_family(as_jet(site, x))
    yj, single_y = as_family(as_jet(site, y))
    result = covariant_derivatives(d.coefficients(site), site, xj.value, yj)
    return result[:, 0, 0] if single_x and single_y else result


def torsion(d: Connection, x: TensorField | Jet, y: TensorField | Jet, site: Site) -> np.ndarray:
    """``D_X Y - D_Y X - [X, Y]``."""
    xj, single_x = as_family(as_jet(site, x))
    yj, single_y = as_family(as_jet(site, y))
    gamma = d.coefficients(site)
    dxy = covariant_derivatives(gamma, site, xj.value, yj)
    dyx = covariant_derivatives(gamma, site, yj.value, xj).transpose(0, 2, 1)
    result = dxy - dyx - brackets(site, xj, yj)
    return result[:, 0, 0] if single_x and single_y else result


def metric_defect(
    d: Connection,
    g: Metric,
    x: TensorField | Jet,
    y: TensorField | Jet,
    z: TensorField | Jet,
    site: Site,
) -> np.ndarray:
    """``(D_X g)(Y, Z) = X g(Y,Z) - g(D_X Y, Z) - g(Y, D_X Z)``, indexed ``[x, y, z]``."""
    xj, _ = as_family(as_jet(site, x))
    yj, _ = as_family(as_jet(site, y))
    zj, _ = as_family(as_jet(site, z))
    gamma = d.coefficients(site)
    gjet = site.jet(g)
    gval = gjet.value
    # X g(Y, Z) by the product rule over the site coordinates
    gyz_grad = (
        np.einsum("ijm,iy,jz->yzm", gjet.grad, yj.value, zj.value)
        + np.einsum("ij,iym,jz->yzm", gval, yj.grad, zj.value)
        + np.einsum("ij,iy,jzm->yzm", gval, yj.value, zj.grad)
    )
    derivative = np.einsum("yzm,mx->xyz", gyz_grad, site.lift(xj.value))
    dxy = covariant_derivatives(gamma, site, xj.value, yj)
    dxz = covariant_derivatives(gamma, site, xj.value, zj)
    result = (
        derivative
        - np.einsum("kxy,kl,lz->xyz", dxy, gval, zj.value)
        - np.einsum("ky,kl,lxz->xyz", yj.value, gval, dxz)
    )
    return np.squeeze(result) if result.size == 1 else result


# ---------------------------------------------------------------------------
# Coordinate tensors
# ---------------------------------------------------------------------------


def torsion_tensor(gamma: np.ndarray) -> np.ndarray:
    return gamma - gamma.transpose(0, 2, 1)


def metric_derivative(gamma: np.ndarray, g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """``(D_i g)_jk`` indexed ``[i, j, k]``."""
    return (
        np.einsum("jki->ijk", dg)
        - np.einsum("lij,lk->ijk", gamma, g)
        - np.einsum("lik,jl->ijk", gamma, g)
    )


def codazzi_tensor(gamma: np.ndarray, g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """``(D_i g)_jk - (D_j g)_ik``."""
    dgd = metric_derivative(gamma, g, dg)
    return dgd - dgd.transpose(1, 0, 2)


def duality_defect(
    gamma: np.ndarray, gamma_star: np.ndarray, g: np.ndarray, dg: np.ndarray
) -> np.ndarray:
    """``d_i g_jk - g(D_i d_j, d_k) - g(d_j, D*_i d_k)`` indexed ``[i, j, k]``."""
    return (
        np.einsum("jki->ijk", dg)
        - np.einsum("lij,lk->ijk", gamma, g)
        - np.einsum("lik,jl->ijk", gamma_star, g)
    )


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def is_statistical(
    d: Connection, g: Metric, sites: Sequence[Site], prefix: str = "connection"
) -> SuiteResult:
    """Torsion and Codazzi residuals of ``(d, g)``; passes iff both vanish."""
    result = SuiteResult(prefix.split(".")[0])
    tid = f"{prefix}.{label(d.name)}.torsion"
    cid = f"{prefix}.{label(d.name)}.codazzi"
    result.declare(tid, f"T^{d.name}(X,Y) = {d.name}_X Y - {d.name}_Y X - [X,Y] = 0")
    result.declare(cid, f"({d.name}_X g)(Y,Z) - ({d.name}_Y g)(X,Z) = 0")
    for site in sites:
        jet = site.ambient_jet(g)
        gamma = d.coefficients(site)
        result.record(tid, site.point, torsion_tensor(gamma))
        result.record(cid, site.point, codazzi_tensor(gamma, jet.value, jet.grad))
    return result


def mean_connection_check(
    d: Connection, d_star: Connection, g: Metric, sites: Sequence[Site], prefix: str = "connection"
) -> SuiteResult:
    """Coefficient residual of ``(D + D*)/2`` against the Levi-Civita connection."""
    lc = levi_civita(g)
    result = SuiteResult(prefix.split(".")[0])
    mid = f"{prefix}.mean-is-levi-civita"
    result.declare(mid, f"({d.name} + {d_star.name})/2 - levi-civita = 0")
    for site in sites:
        mean = 0.5 * (d.coefficients(site) + d_star.coefficients(site))
        result.record(mid, site.point, mean - lc.coefficients(site))
    return result


def connection_suite(
    d: Connection,
    g: Metric,
    sites: Sequence[Site],
    *,
    difference: DifferenceTensor | None = None,
    declared_dual: Connection | None = None,
    fields: Callable[[Site], Jet] | None = None,
    degeneracy: float = DEFAULT_DEGENERACY,
) -> SuiteResult:
    """Every connection-level row for one ambient structure.

    *fields* returns the family of vector fields used for the field-based
    duality row at a site.
    """
    lc = levi_civita(g, degeneracy)
    d_star = dual_connection(d, g, degeneracy)
    d_star_star = dual_connection(d_star, g, degeneracy)
    lc_dual = dual_connection(lc, g, degeneracy)
    k = difference if difference is not None else difference_tensor(d, g)
    roundtrip = connection_from_K(lc, difference_tensor(d, g))

    result = SuiteResult("connection")
    result.merge(is_statistical(d, g, sites))
    result.merge(is_statistical(d_star, g, sites))
    result.merge(mean_connection_check(d, d_star, g, sites))

    rows = {
        "connection.levi-civita.torsion": "T^levi-civita = 0",
        "connection.levi-civita.metric": "(levi-civita_X g)(Y,Z) = 0",
        "connection.dual.identity": "Z g(X,Y) - g(D_Z X, Y) - g(X, D*_Z Y) = 0",
        "connection.dual.involution": "(D*)* - D = 0",
        "connection.dual.levi-civita-self-dual": "(levi-civita)* - levi-civita = 0",
        "connection.difference.roundtrip": "levi-civita + (D - levi-civita) - D = 0",
    }
    for cid, identity in rows.items():
        result.declare(cid, identity)
    result.declare("connection.D.metric-defect", "(D_X g)(Y,Z)", REPORT)
    result.declare("connection.difference.symmetry", "K(X,Y) - K(Y,X) = 0", REPORT)
    result.declare("connection.difference.self-adjoint", "g(K(X,Y),Z) - g(K(X,Z),Y) = 0", REPORT)
    if fields is not None:
        result.declare(
            "connection.dual.identity-fields", "Z g(X,Y) - g(D_Z X, Y) - g(X, D*_Z Y) = 0"
        )
    if declared_dual is not None:
        result.declare(
            "connection.dual.declared", f"{declared_dual.name} - D* = 0 (declared dual)", REPORT
        )

    for site in sites:
        jet = site.ambient_jet(g)
        gval, dg = jet.value, jet.grad
        gamma = d.coefficients(site)
        gamma_star = d_star.coefficients(site)
        gamma_lc = lc.coefficients(site)
        point = site.point
        result.record("connection.levi-civita.torsion", point, torsion_tensor(gamma_lc))
        result.record(
            "connection.levi-civita.metric", point, metric_derivative(gamma_lc, gval, dg)
        )
        result.record("connection.dual.identity", point, duality_defect(gamma, gamma_star, gval, dg))
        result.record("connection.dual.involution", point, d_star_star.coefficients(site) - gamma)
        result.record(
            "connection.dual.levi-civita-self-dual", point, lc_dual.coefficients(site) - gamma_lc
        )
        result.record("connection.difference.roundtrip", point, roundtrip.coefficients(site) - gamma)
        result.record("connection.D.metric-defect", point, metric_derivative(gamma, gval, dg))
        result.record("connection.difference.symmetry", point, k.symmetry_residual(site))
        result.record(
            "connection.difference.self-adjoint", point, k.self_adjoint_residual(site, gval)
        )
        if fields is not None:
            family = fields(site)
            gxy_grad = (
                np.einsum("ijm,ix,jy->xym", site.jet(g).grad, family.value, family.value)
                + np.einsum("ij,ixm,jy->xym", gval, family.grad, family.value)
                + np.einsum("ij,ix,jym->xym", gval, family.value, family.grad)
            )
            zg = np.einsum("xym,mz->zxy", gxy_grad, site.lift(family.value))
            dzx = covariant_derivatives(gamma, site, family.value, family)
            dzy = covariant_derivatives(gamma_star, site, family.value, family)
            defect = (
                zg
                - np.einsum("kzx,kl,ly->zxy", dzx, gval, family.value)
                - np.einsum("kx,kl,lzy->zxy", family.value, gval, dzy)
            )
            result.record("connection.dual.identity-fields", point, defect)
        if declared_dual is not None:
            result.record(
                "connection.dual.declared", point, declared_dual.coefficients(site) - gamma_star
            )
    return result
