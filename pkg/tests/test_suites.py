from __future__ import annotations

import logging
import math

import pytest

from pylightlike.errors import ConfigurationError, UnknownSuiteError
from pylightlike.fixtures import load_fixture
from pylightlike.report import FAIL, PASS, REPORT_ONLY
from pylightlike.suites import (
    ALL,
    RunSettings,
    available_suites,
    get_suite,
    resolve,
    run_suites,
    settings_from,
)

FAST = RunSettings(points=6)


def test_registry_order() -> None:
    assert available_suites() == ["connection", "section2", "section3", "contact", "ssi"]
    assert get_suite("ssi").requires == ("contact", "hypersurface")
    assert get_suite("connection").description


def test_unknown_suite() -> None:
    with pytest.raises(UnknownSuiteError, match="available"):
        get_suite("section9")


def test_all_skips_inapplicable_suites(caplog: pytest.LogCaptureFixture) -> None:
    fixture = load_fixture("ctrl_sasaki")
    with caplog.at_level(logging.INFO, logger="pylightlike.suites"):
        suites = resolve([ALL], fixture)
    assert [s.name for s in suites] == ["connection", "contact"]
    assert "skipping suite section2 for ctrl_sasaki: no hypersurface" in caplog.text


def test_explicit_inapplicable_suite_is_an_error() -> None:
    fixture = load_fixture("ex3_graph")
    with pytest.raises(ConfigurationError, match="no contact"):
        resolve(["contact"], fixture)


def test_resolve_keeps_registry_order() -> None:
    fixture = load_fixture("hyp_x1y2")
    names = [s.name for s in resolve(["ssi", "connection", "ssi"], fixture)]
    assert names == ["connection", "ssi"]
    assert [s.name for s in resolve([], fixture)] == available_suites()


@pytest.mark.parametrize(
    "kwargs",
    [{"points": 0}, {"tol": 0.0}, {"tol": -1e-8}, {"random_fields": 0}],
)
def test_run_settings_validation(kwargs: dict[str, float]) -> None:
    with pytest.raises(ConfigurationError):
        RunSettings(**kwargs)


def test_settings_from_ignores_unknown_keys() -> None:
    settings = settings_from({"points": 5, "tol": 1e-6, "format": "json"})
    assert settings == RunSettings(points=5, tol=1e-6)


def test_control_run_passes() -> None:
    fixture = load_fixture("ctrl_sasaki")
    report = run_suites(fixture, [ALL], FAST)
    assert report.suites == ("connection", "contact")
    assert report.exit_code() == 0, [r.check_id for r in report.failures()]
    assert report.settings["parameters"] == {"lam": 0.5}
    assert report.settings["points"] == 6
    assert report.sample_points["ambient"].shape == (6, 5)
    assert report.row("contact.acm.phi-cubed").status == PASS


def test_perturbed_control_reports_without_failing() -> None:
    fixture = load_fixture("ctrl_sasaki_perturbed")
    report = run_suites(fixture, ["contact"], FAST)
    assert report.exit_code() == 0
    assert all(row.status != FAIL for row in report.rows)
    assert any(not row.within_tolerance for row in report.rows)


def test_hypersurface_samples_are_recorded() -> None:
    fixture = load_fixture("ex3_graph")
    report = run_suites(fixture, ["section2"], FAST)
    assert set(report.sample_points) == {"hypersurface"}
    assert report.sample_points["hypersurface"].shape == (6, 3)
    assert "parameters" not in report.settings


def test_reports_are_deterministic() -> None:
    first = run_suites(load_fixture("hyp_x1y2"), [ALL], FAST).to_json()
    second = run_suites(load_fixture("hyp_x1y2"), [ALL], FAST).to_json()
    assert first == second


def test_graph_connection_report_rows() -> None:
    report = run_suites(load_fixture("ex3_graph"), ["connection"], FAST)
    for cid in ("connection.D.metric-defect", "connection.difference.self-adjoint"):
        row = report.row(cid)
        assert row.status == REPORT_ONLY
        assert math.isfinite(row.max_residual), cid
        assert row.sample_count == 6


def test_flat_contact_reports_sasakian_nu() -> None:
    report = run_suites(load_fixture("ex4_flat_contact"), ["contact"], FAST)
    row = report.row("contact.sasakian.nu")
    # nu is parallel, so the row measures phi X
    assert row.status == REPORT_ONLY
    assert row.max_residual > 0.1
    assert report.exit_code() == 0


@pytest.mark.parametrize("name", ["ctrl_sasaki_indef", "ex4_twisted_emended"])
def test_sasakian_hypersurface_runs_pass(name: str) -> None:
    report = run_suites(load_fixture(name), [ALL], FAST)
    assert report.suites == ("connection", "section2", "section3", "contact", "ssi")
    assert report.exit_code() == 0, [r.check_id for r in report.failures()]
