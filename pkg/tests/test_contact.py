from __future__ import annotations

import pytest

from pylightlike.contact import (
    SasakiStatisticalPackage,
    acm_residuals,
    contact_suite,
    sasaki_statistical_residuals,
    sasakian_residuals,
    theorem42_residuals,
)
from pylightlike.fixtures import Fixture, load_fixture
from tests.utils import ambient_sites

TOL = 1e-8


def _package(fixture: Fixture) -> SasakiStatisticalPackage:
    assert fixture.contact is not None
    return SasakiStatisticalPackage.build(
        fixture.contact, fixture.metric, fixture.connection, fixture.difference
    )


def test_control_is_sasakian() -> None:
    fixture = load_fixture("ctrl_sasaki")
    assert fixture.contact is not None
    sites = ambient_sites(fixture, 100)
    assert acm_residuals(fixture.contact, fixture.metric, sites).passed(TOL)
    assert sasakian_residuals(fixture.contact, fixture.metric, sites).passed(TOL)


@pytest.mark.parametrize("lam", [-1.0, 0.0, 0.5, 2.0])
def test_statistical_criterion_agrees_on_controls(lam: float) -> None:
    fixture = load_fixture("ctrl_sasaki", parameters={"lam": lam})
    pkg = _package(fixture)
    sites = ambient_sites(fixture, 100)
    direct = sasaki_statistical_residuals(pkg, sites)
    criterion = theorem42_residuals(pkg, sites)
    assert direct.passed(TOL)
    assert criterion.passed(TOL)


def test_perturbed_control_fails_both() -> None:
    fixture = load_fixture("ctrl_sasaki_perturbed")
    pkg = _package(fixture)
    sites = ambient_sites(fixture, 100)
    for result in (sasaki_statistical_residuals(pkg, sites), theorem42_residuals(pkg, sites)):
        failing = result.failing(TOL)
        assert failing
        assert max(result.max_residual(cid) for cid in failing) > 1e-3
    assert sasakian_residuals(fixture.contact, fixture.metric, sites).passed(TOL)


def test_flat_contact_is_not_sasakian() -> None:
    fixture = load_fixture("ex4_flat_contact")
    assert fixture.contact is not None
    sites = ambient_sites(fixture, 20)
    assert acm_residuals(fixture.contact, fixture.metric, sites).passed(TOL)
    result = sasakian_residuals(fixture.contact, fixture.metric, sites)
    # nu is parallel, so nabla nu + phi = phi
    assert result.max_residual("contact.sasakian.nu") == pytest.approx(1.0)


def test_flat_contact_k_phi_compatible() -> None:
    fixture = load_fixture("ex4_flat_contact")
    result = sasaki_statistical_residuals(_package(fixture), ambient_sites(fixture, 20))
    assert result.max_residual("contact.sasaki-statistical.k-phi") < TOL
    assert result.max_residual("contact.sasaki-statistical.D.codazzi") < TOL


def test_contact_suite_collects_every_family() -> None:
    fixture = load_fixture("ctrl_sasaki")
    result = contact_suite(_package(fixture), ambient_sites(fixture, 8))
    ids = list(result)
    for prefix in (
        "contact.acm.",
        "contact.sasakian.",
        "contact.sasaki-statistical.",
        "contact.criterion.",
    ):
        assert any(cid.startswith(prefix) for cid in ids), prefix
    assert "contact.acm.phi-cubed" in result
    assert "contact.criterion.phi-dual" in result
    assert result.passed(TOL)
