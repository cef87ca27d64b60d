from __future__ import annotations

import math

import numpy as np
import pytest

from pylightlike.connection import covariant_derivative, levi_civita
from pylightlike.errors import NotLightlikeError, SingularScreenError
from pylightlike.fixtures import build_fixture, load_fixture, read_document
from pylightlike.geometry import family, inner
from pylightlike.lightlike import (
    gauss_decompose,
    induced_metric,
    probes,
    radical,
    radical_decompose,
    solve_transversal,
    suite_section2,
    suite_section3,
    weingarten_decompose,
)
from pylightlike.report import NOT_EVALUATED, PASS
from tests.utils import EUCLIDEAN_PLANE, hypersurface_sites

TOL = 1e-8
SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def graph():
    return load_fixture("ex3_graph")


def test_graph_null_frame(graph) -> None:
    hyp, sd, g = graph.hypersurface, graph.screen, graph.metric
    site = hyp.site([0.0, 1.0, 0.0])
    xi = site.jet(sd.xi).value
    n_vec = site.jet(sd.transversal).value
    np.testing.assert_allclose(xi, [1.0, -1.0, SQRT2, 0.0])
    np.testing.assert_allclose(n_vec, [-0.25, 0.25, SQRT2 / 4, 0.0])
    gval = site.ambient_jet(g).value
    assert inner(gval, xi, xi) == pytest.approx(0.0, abs=1e-12)
    assert inner(gval, n_vec, n_vec) == pytest.approx(0.0, abs=1e-12)
    assert inner(gval, xi, n_vec) == pytest.approx(1.0)
    assert abs(np.linalg.det(induced_metric(hyp, g, site))) < 1e-12


def test_radical_and_transversal_are_recovered(graph) -> None:
    hyp, sd, g = graph.hypersurface, graph.screen, graph.metric
    for site in hypersurface_sites(graph, 8):
        xi = site.jet(sd.xi).value
        generator = radical(hyp, g, site, transversal=sd.transversal)
        np.testing.assert_allclose(generator, xi, atol=1e-10)
        screen = family(site, sd.screen).value
        solved = solve_transversal(g, xi, screen, site)
        np.testing.assert_allclose(solved, site.jet(sd.transversal).value, atol=1e-10)


def test_radical_geodesic_on_graph(graph) -> None:
    lc = levi_civita(graph.metric)
    sd = graph.screen
    for site in hypersurface_sites(graph, 8):
        xi = site.jet(sd.xi).value
        tangent, b = gauss_decompose(lc, sd, graph.metric, sd.xi, sd.xi, site)
        # nabla_xi xi = sqrt(2) xi and B(xi, xi) = 0
        assert b == pytest.approx(0.0, abs=1e-10)
        np.testing.assert_allclose(tangent, SQRT2 * xi, atol=1e-10)


def test_levi_civita_radical_consistency(graph) -> None:
    lc = levi_civita(graph.metric)
    sd = graph.screen
    for site in hypersurface_sites(graph, 4):
        shape_xi, residual = radical_decompose(lc, sd, graph.metric, sd.xi, site)
        assert residual == pytest.approx(0.0, abs=1e-10)
        np.testing.assert_allclose(shape_xi, 0.0, atol=1e-10)
        shape, _ = weingarten_decompose(lc, sd, graph.metric, sd.xi, site)
        gval = site.ambient_jet(graph.metric).value
        assert abs(inner(gval, shape, site.jet(sd.transversal).value)) < 1e-10


def test_section2_suite_passes_on_graph(graph) -> None:
    result = suite_section2(graph, hypersurface_sites(graph, 16))
    assert result.passed(TOL), result.failing(TOL)
    assert result.max_residual("section2.levi-civita.shape-xi-xi") < TOL
    assert result.max_residual("section2.frame.transversal-match") < TOL
    assert "section2.D.shape-xi-xi" in result
    assert "section2.D-star.induced-metric" in result


def test_section3_core_identities_on_graph(graph) -> None:
    result = suite_section3(graph, hypersurface_sites(graph, 16))
    keys = (
        "induced-duality",
        "D.torsion",
        "B.symmetry",
        "b-xi-sum",
        "gauss.tangency",
        "weingarten.tangency",
    )
    for key in keys:
        assert result.max_residual(f"section3.{key}") < TOL, key


def test_totally_geodesic_control() -> None:
    fixture = load_fixture("ctrl_totally_geodesic")
    result = suite_section3(fixture, hypersurface_sites(fixture, 10))
    assert result.max_residual("section3.B.gauge") < 1e-12
    rows = {row.check_id: row for row in result.rows(TOL, fixture.expectations)}
    assert rows["section3.B.totally-geodesic"].status == PASS
    assert rows["section3.B-star.totally-geodesic"].status == PASS
    assert result.passed(TOL)


def test_closed_gate_is_not_evaluated(graph) -> None:
    result = suite_section3(graph, hypersurface_sites(graph, 6))
    assert result.max_residual("section3.B.gauge") > TOL
    rows = {row.check_id: row for row in result.rows(TOL)}
    assert rows["section3.B.totally-geodesic"].status == NOT_EVALUATED


def test_probes_are_seeded(graph) -> None:
    sites = hypersurface_sites(graph, 3)
    first = probes(graph.hypersurface, graph.screen, graph.metric, sites, seed=5)
    second = probes(graph.hypersurface, graph.screen, graph.metric, sites, seed=5)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.fields.value, b.fields.value)
    # xi, two screen fields, three frame fields and two random combinations
    assert first[0].size == 1 + 2 + 3 + 2


def test_euclidean_plane_is_not_lightlike() -> None:
    fixture = build_fixture(read_document(EUCLIDEAN_PLANE))
    site = fixture.hypersurface.site([0.1, 0.2])
    with pytest.raises(NotLightlikeError) as info:
        radical(fixture.hypersurface, fixture.metric, site)
    assert min(info.value.singular_values) > 0.5


def test_null_screen_is_singular() -> None:
    fixture = load_fixture("ctrl_totally_geodesic")
    site = fixture.hypersurface.site([0.2, 0.3, -0.1])
    xi = site.jet(fixture.screen.xi).value
    with pytest.raises(SingularScreenError):
        solve_transversal(fixture.metric, xi, xi[:, None], site)


def _rotation(graph):
    # W2 = -x3 d/dx2 + x2 d/dx3, the third frame field
    return graph.hypersurface.frame[2]


def test_levi_civita_along_rotation(graph) -> None:
    lc = levi_civita(graph.metric)
    w2 = _rotation(graph)
    for site in hypersurface_sites(graph, 8):
        _, _, x2, x3 = site.image
        np.testing.assert_allclose(covariant_derivative(lc, w2, w2, site), [0.0, 0.0, -x2, -x3], atol=1e-10)


def test_declared_dual_along_rotation(graph) -> None:
    w2 = _rotation(graph)
    for site in hypersurface_sites(graph, 8):
        x3 = site.image[3]
        derivative = covariant_derivative(graph.declared_dual, w2, w2, site)
        np.testing.assert_allclose(derivative, [0.0, 0.0, 0.0, -2.0 * x3], atol=1e-10)


def test_radical_geodesic_for_shifted_connection(graph) -> None:
    sd = graph.screen
    for site in hypersurface_sites(graph, 8):
        xi = site.jet(sd.xi).value
        tangent, b = gauss_decompose(graph.connection, sd, graph.metric, sd.xi, sd.xi, site)
        assert b == pytest.approx(0.0, abs=1e-10)
        np.testing.assert_allclose(tangent, SQRT2 * xi, atol=1e-10)


def test_second_form_of_rotation(graph) -> None:
    site = graph.hypersurface.site([0.0, 1.0, 0.0])
    w2 = _rotation(graph)
    _, b = gauss_decompose(graph.connection, graph.screen, graph.metric, w2, w2, site)
    assert b == pytest.approx(-2.0 * SQRT2)


@pytest.mark.parametrize("name", ["hyp_x1y2", "hyp_x2y2"])
def test_section3_on_screen_semi_invariant_hypersurfaces(name: str) -> None:
    fixture = load_fixture(name)
    result = suite_section3(fixture, hypersurface_sites(fixture, 12))
    for key in (
        "b-xi-sum",
        "transversal-sum",
        "shape-xi",
        "shape-xi-star",
        "radical-sum",
        "tau-radical",
        "tau-star-radical",
        "induced-duality",
    ):
        assert result.max_residual(f"section3.{key}") < TOL, key
