from __future__ import annotations

import numpy as np
import pytest

from pylightlike.connection import (
    ChristoffelConnection,
    DualConnection,
    LeviCivita,
    connection_suite,
    difference_tensor,
    is_statistical,
    label,
    metric_defect,
    torsion,
)
from pylightlike.errors import SingularMetricError
from pylightlike.expr import constant
from pylightlike.fixtures import build_fixture, load_fixture, read_document
from pylightlike.geometry import Chart, Site, TensorField
from pylightlike.jets import Jet, stack
from tests.utils import MINKOWSKI_PLANE, ambient_sites, metric, vector_field


def _polar() -> tuple[Chart, object]:
    chart = Chart(("x", "y"), ((0.5, 2.0), (-1.0, 1.0)), name="polar")
    return chart, metric(chart, [["1", "0"], ["0", "x^2"]])


def test_levi_civita_of_polar_metric() -> None:
    chart, g = _polar()
    site = Site(chart, [1.5, 0.2])
    gamma = LeviCivita(g).coefficients(site)
    assert gamma[0, 1, 1] == pytest.approx(-1.5)
    assert gamma[1, 0, 1] == pytest.approx(1 / 1.5)
    assert gamma[1, 1, 0] == pytest.approx(1 / 1.5)
    assert gamma[0, 0, 0] == pytest.approx(0.0)


def test_levi_civita_is_self_dual() -> None:
    chart, g = _polar()
    site = Site(chart, [0.8, -0.4])
    lc = LeviCivita(g)
    np.testing.assert_allclose(
        DualConnection(lc, g).coefficients(site), lc.coefficients(site), atol=1e-12
    )


def test_dual_is_an_involution() -> None:
    fixture = build_fixture(read_document(MINKOWSKI_PLANE.format(name="mink")))
    twice = DualConnection(fixture.dual, fixture.metric)
    for site in ambient_sites(fixture, 5):
        np.testing.assert_allclose(
            twice.coefficients(site), fixture.connection.coefficients(site), atol=1e-12
        )
    assert fixture.dual.name == "D*"


def test_dual_of_shift_is_negative_shift() -> None:
    fixture = build_fixture(read_document(MINKOWSKI_PLANE.format(name="mink")))
    site = ambient_sites(fixture, 1)[0]
    x = site.point[1]
    # flat metric: D* = levi-civita - K for self-adjoint K
    assert fixture.dual.coefficients(site)[1, 1, 1] == pytest.approx(-x)
    k = difference_tensor(fixture.connection, fixture.metric)
    assert k.values(site)[1, 1, 1] == pytest.approx(x)


def test_label() -> None:
    assert label("D*") == "D-star"
    assert label("D") == "D"


def test_torsion_of_asymmetric_connection() -> None:
    chart = Chart(("x", "y"), ((-1.0, 1.0), (-1.0, 1.0)))
    components = [[[constant(0.0)] * 2 for _ in range(2)] for _ in range(2)]
    components[0][0][1] = constant(1.0)
    d = ChristoffelConnection(TensorField.build(chart, components))
    site = Site(chart, [0.1, 0.2])
    dx = vector_field(chart, "1", "0")
    dy = vector_field(chart, "0", "1")
    np.testing.assert_allclose(torsion(d, dx, dy, site), [1.0, 0.0])
    g = metric(chart, [["1", "0"], ["0", "1"]])
    result = is_statistical(d, g, [site])
    assert result.failing(1e-8) == ["connection.D.codazzi", "connection.D.torsion"]


def test_metric_defect_of_levi_civita_vanishes() -> None:
    chart, g = _polar()
    site = Site(chart, [1.2, 0.3])
    x = vector_field(chart, "y", "1")
    y = vector_field(chart, "x", "x*y")
    defect = metric_defect(LeviCivita(g), g, x, y, y, site)
    assert abs(float(defect)) < 1e-12


def test_singular_metric_raises() -> None:
    chart = Chart(("x", "y"), ((-1.0, 1.0), (-1.0, 1.0)))
    g = metric(chart, [["x", "0"], ["0", "1"]])
    with pytest.raises(SingularMetricError):
        LeviCivita(g).coefficients(Site(chart, [0.0, 0.5]))


def test_connection_suite_on_graph_fixture() -> None:
    fixture = load_fixture("ex3_graph")
    result = connection_suite(
        fixture.connection,
        fixture.metric,
        ambient_sites(fixture, 12),
        difference=fixture.difference,
        declared_dual=fixture.declared_dual,
    )
    for cid in (
        "connection.D.torsion",
        "connection.levi-civita.torsion",
        "connection.levi-civita.metric",
        "connection.dual.identity",
        "connection.dual.involution",
        "connection.dual.levi-civita-self-dual",
        "connection.difference.roundtrip",
    ):
        assert result.max_residual(cid) < 1e-8, cid
    assert "connection.dual.declared" in result
    assert "connection.dual.identity-fields" not in result


def test_connection_suite_field_duality() -> None:
    fixture = build_fixture(read_document(MINKOWSKI_PLANE.format(name="mink")))
    first = vector_field(fixture.chart, "t*x", "1 + t")
    second = vector_field(fixture.chart, "x^2", "t")

    def family(site: Site) -> Jet:
        return stack([site.jet(first), site.jet(second)])

    result = connection_suite(
        fixture.connection, fixture.metric, ambient_sites(fixture, 6), fields=family
    )
    assert result.max_residual("connection.dual.identity-fields") < 1e-10
    assert result.passed(1e-8)


def test_graph_difference_on_rotation() -> None:
    fixture = load_fixture("ex3_graph")
    # W2 = -x3 d/dx2 + x2 d/dx3, so K(W2, W2) = -x2 d/dx2 + x3 d/dx3
    w2 = vector_field(fixture.chart, "0", "0", "-x3", "x2")
    for site in ambient_sites(fixture, 20):
        x2, x3 = site.point[2], site.point[3]
        w = site.jet(w2).value
        np.testing.assert_allclose(fixture.difference.apply(site, w, w), [0.0, 0.0, -x2, x3], atol=1e-10)
