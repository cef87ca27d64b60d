"""Almost contact metric structures and their Sasakian statistical checks.

All checks are tensorial and are evaluated on coordinate vectors, so a
vanishing row means the identity holds for every pair of vector fields at
that point.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .connection import (
    DEFAULT_DEGENERACY,
    Connection,
    DifferenceTensor,
    difference_tensor,
    dual_connection,
    is_statistical,
    levi_civita,
)
from .geometry import Metric, OneForm, Site, Tensor11Field, VectorField
from .report import SuiteResult

logger = logging.getLogger(__name__)

__all__ = [
    "ContactStructure",
    "SasakiStatisticalPackage",
    "acm_residuals",
    "contact_suite",
    "sasaki_statistical_residuals",
    "sasakian_residuals",
    "theorem42_residuals",
]


@dataclass(frozen=True, eq=False)
class ContactStructure:
    """``(phi, nu, eta)`` with sign ``epsilon = eta(nu)``."""

    phi: Tensor11Field
    nu: VectorField
    eta: OneForm
    epsilon: int = 1

    def __post_init__(self) -> None:
        if self.epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon}")


@dataclass(frozen=True, eq=False)
class SasakiStatisticalPackage:
    contact: ContactStructure
    metric: Metric
    connection: Connection
    dual: Connection
    difference: DifferenceTensor

    @classmethod
    def build(
        cls,
        contact: ContactStructure,
        metric: Metric,
        connection: Connection,
        difference: DifferenceTensor | None = None,
        degeneracy: float = DEFAULT_DEGENERACY,
    ) -> SasakiStatisticalPackage:
        return cls(
            contact=contact,
            metric=metric,
            connection=connection,
            dual=dual_connection(connection, metric, degeneracy),
            difference=difference if difference is not None else difference_tensor(connection, metric),
        )


@dataclass(frozen=True)
class _Frame:
    """Structure tensors at one ambient site."""

    g: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray  # [i, k, j] = d_i phi^k_j
    nu: np.ndarray
    dnu: np.ndarray  # [k, i] = d_i nu^k
    eta: np.ndarray

    @classmethod
    def at(cls, site: Site, cs: ContactStructure, g: Metric) -> _Frame:
        phi = site.ambient_jet(cs.phi)
        nu = site.ambient_jet(cs.nu)
        return cls(
            g=site.ambient_jet(g).value,
            phi=phi.value,
            dphi=np.einsum("kji->ikj", phi.grad),
            nu=nu.value,
            dnu=nu.grad,
            eta=site.ambient_jet(cs.eta).value,
        )

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.g.shape[0])

    def nabla_phi(self, gamma: np.ndarray, gamma_out: np.ndarray | None = None) -> np.ndarray:
        """``D_i(phi d_j) - phi(D'_i d_j)`` as ``[i, k, j]`` (``D' = D`` unless given)."""
        out = gamma if gamma_out is None else gamma_out
        return (
            self.dphi
            + np.einsum("kil,lj->ikj", gamma, self.phi)
            - np.einsum("kl,lij->ikj", self.phi, out)
        )

    def nabla_nu(self, gamma: np.ndarray) -> np.ndarray:
        """``(D_i nu)^k`` as ``[k, i]``."""
        return self.dnu + np.einsum("kil,l->ki", gamma, self.nu)


def acm_residuals(
    cs: ContactStructure, g: Metric, sites: Sequence[Site], prefix: str = "contact.acm"
) -> SuiteResult:
    """Almost contact metric conditions plus the derived ``phi^3 + phi = 0``."""
    result = SuiteResult(prefix.split(".")[0])
    rows = {
        "phi-nu": "phi nu = 0",
        "eta-phi": "eta(phi X) = 0",
        "eta-nu": "eta(nu) - epsilon = 0",
        "phi-squared": "phi^2 X + X - eta(X) nu = 0",
        "g-nu": "g(X,nu) - epsilon eta(X) = 0",
        "compatibility": "g(phi X, phi Y) - g(X,Y) + epsilon eta(X) eta(Y) = 0",
        "phi-cubed": "phi^3 X + phi X = 0",
    }
    for key, identity in rows.items():
        result.declare(f"{prefix}.{key}", identity)
    eps = float(cs.epsilon)
    for site in sites:
        f = _Frame.at(site, cs, g)
        p = site.point
        phi2 = f.phi @ f.phi
        result.record(f"{prefix}.phi-nu", p, f.phi @ f.nu)
        result.record(f"{prefix}.eta-phi", p, f.eta @ f.phi)
        result.record(f"{prefix}.eta-nu", p, f.eta @ f.nu - eps)
        result.record(f"{prefix}.phi-squared", p, phi2 + f.identity - np.outer(f.nu, f.eta))
        result.record(f"{prefix}.g-nu", p, f.g @ f.nu - eps * f.eta)
        result.record(
            f"{prefix}.compatibility",
            p,
            f.phi.T @ f.g @ f.phi - f.g + eps * np.outer(f.eta, f.eta),
        )
        result.record(f"{prefix}.phi-cubed", p, phi2 @ f.phi + f.phi)
    return result


def sasakian_residuals(
    cs: ContactStructure,
    g: Metric,
    sites: Sequence[Site],
    prefix: str = "contact.sasakian",
    degeneracy: float = DEFAULT_DEGENERACY,
) -> SuiteResult:
    """Indefinite Sasakian conditions for the Levi-Civita connection of *g*."""
    lc = levi_civita(g, degeneracy)
    result = SuiteResult(prefix.split(".")[0])
    result.declare(f"{prefix}.phi", "(nabla_X phi) Y - g(X,Y) nu + epsilon eta(Y) X = 0")
    result.declare(f"{prefix}.nu", "nabla_X nu + phi X = 0")
    eps = float(cs.epsilon)
    for site in sites:
        f = _Frame.at(site, cs, g)
        gamma = lc.coefficients(site)
        target = np.einsum("ij,k->ikj", f.g, f.nu) - eps * np.einsum("j,ki->ikj", f.eta, f.identity)
        result.record(f"{prefix}.phi", site.point, f.nabla_phi(gamma) - target)
        result.record(f"{prefix}.nu", site.point, f.nabla_nu(gamma) + f.phi)
    return result


def sasaki_statistical_residuals(
    pkg: SasakiStatisticalPackage,
    sites: Sequence[Site],
    prefix: str = "contact.sasaki-statistical",
) -> SuiteResult:
    """Statistical structure, Sasakian base and ``K(X, phi Y) = -phi K(X, Y)``."""
    result = SuiteResult(prefix.split(".")[0])
    result.merge(is_statistical(pkg.connection, pkg.metric, sites, prefix=prefix))
    result.merge(acm_residuals(pkg.contact, pkg.metric, sites, prefix=f"{prefix}.acm"))
    result.merge(sasakian_residuals(pkg.contact, pkg.metric, sites, prefix=f"{prefix}.sasakian"))
    kid = f"{prefix}.k-phi"
    result.declare(kid, "K(X, phi Y) + phi K(X,Y) = 0")
    for site in sites:
        f = _Frame.at(site, pkg.contact, pkg.metric)
        k = pkg.difference.values(site)
        residual = np.einsum("kil,lj->kij", k, f.phi) + np.einsum("kl,lij->kij", f.phi, k)
        result.record(kid, site.point, residual)
    return result


def theorem42_residuals(
    pkg: SasakiStatisticalPackage,
    sites: Sequence[Site],
    prefix: str = "contact.criterion",
) -> SuiteResult:
    """The connection-level criterion for a Sasakian statistical structure.

    Carries the statistical and almost contact rows it presupposes, so its
    overall verdict is comparable with :func:`sasaki_statistical_residuals`.
    """
    result = SuiteResult(prefix.split(".")[0])
    result.merge(is_statistical(pkg.connection, pkg.metric, sites, prefix=prefix))
    result.merge(acm_residuals(pkg.contact, pkg.metric, sites, prefix=f"{prefix}.acm"))
    result.declare(f"{prefix}.phi", "D_X phi Y - phi D*_X Y - g(X,Y) nu + g(Y,nu) X = 0")
    result.declare(f"{prefix}.nu", "D_X nu + phi X - g(D_X nu, nu) nu = 0")
    result.declare(f"{prefix}.phi-dual", "D*_X phi Y - phi D_X Y - g(X,Y) nu + g(Y,nu) X = 0")
    for site in sites:
        f = _Frame.at(site, pkg.contact, pkg.metric)
        gamma = pkg.connection.coefficients(site)
        gamma_star = pkg.dual.coefficients(site)
        nu_low = f.g @ f.nu
        target = np.einsum("ij,k->ikj", f.g, f.nu) - np.einsum("j,ki->ikj", nu_low, f.identity)
        result.record(f"{prefix}.phi", site.point, f.nabla_phi(gamma, gamma_star) - target)
        result.record(f"{prefix}.phi-dual", site.point, f.nabla_phi(gamma_star, gamma) - target)
        dnu = f.nabla_nu(gamma)
        along = np.einsum("li,lm,m->i", dnu, f.g, f.nu)
        result.record(f"{prefix}.nu", site.point, dnu + f.phi - np.outer(f.nu, along))
    return result


def contact_suite(pkg: SasakiStatisticalPackage, sites: Sequence[Site]) -> SuiteResult:
    result = SuiteResult("contact")
    result.merge(acm_residuals(pkg.contact, pkg.metric, sites))
    result.merge(sasakian_residuals(pkg.contact, pkg.metric, sites))
    result.merge(sasaki_statistical_residuals(pkg, sites))
    result.merge(theorem42_residuals(pkg, sites))
    logger.debug("contact suite evaluated %d checks", len(result.checks))
    return result
