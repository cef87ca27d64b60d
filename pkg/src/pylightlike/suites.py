"""Suite registry and the runner that assembles a :class:`CheckReport`."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Iterable, Mapping
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .connection import DEFAULT_DEGENERACY, connection_suite
from .contact import SasakiStatisticalPackage, contact_suite
from .errors import ConfigurationError, UnknownSuiteError
from .fixtures import Fixture
from .geometry import Chart, Site, draw_coefficients, polynomial_fields
from .jets import Jet
from .lightlike import suite_section2, suite_section3
from .report import CheckReport, SuiteResult
from .ssi import (
    build_ssi,
    f_structure_suite,
    integrability_suite,
    lemma52_53_suite,
    parallel_and_geodesic_report,
    prop51_suite,
)

logger = logging.getLogger(__name__)

__all__ = [
    "ALL",
    "RunSettings",
    "Samples",
    "Suite",
    "available_suites",
    "get_suite",
    "register_suite",
    "resolve",
    "run_suites",
    "settings_from",
]

ALL = "all"
HYPERSURFACE = "hypersurface"
CONTACT = "contact"


@dataclass(frozen=True)
class RunSettings:
    points: int = 64
    tol: float = 1e-8
    seed: int = 42
    degeneracy: float = DEFAULT_DEGENERACY
    random_fields: int = 2
    max_rejections: int = 100_000

    def __post_init__(self) -> None:
        if self.points < 1:
            raise ConfigurationError(f"points must be positive, got {self.points}")
        if not self.tol > 0:
            raise ConfigurationError(f"tol must be positive, got {self.tol}")
        if self.random_fields < 1:
            raise ConfigurationError(f"random_fields must be positive, got {self.random_fields}")

    def to_dict(self) -> dict[str, float | int]:
        return asdict(self)


@dataclass(eq=False)
class Samples:
    """Seeded sample sites for one fixture, built on first use."""

    fixture: Fixture
    settings: RunSettings
    points: dict[str, np.ndarray] = field(default_factory=dict)

    def _draw(self, role: str, chart: Chart) -> np.ndarray:
        if role not in self.points:
            self.points[role] = chart.sample(
                self.settings.points, self.settings.seed, max_rejections=self.settings.max_rejections
            )
        return self.points[role]

    @cached_property
    def ambient(self) -> list[Site]:
        chart = self.fixture.chart
        return [Site(chart, p, index=i) for i, p in enumerate(self._draw("ambient", chart))]

    @cached_property
    def hypersurface(self) -> list[Site]:
        hyp = self.fixture.hypersurface
        if hyp is None:
            raise ConfigurationError(f"fixture {self.fixture.name!r} has no hypersurface")
        return hyp.sites(self._draw("hypersurface", hyp.chart))


SuiteRunner = Callable[[Fixture, Samples, RunSettings], SuiteResult]


@dataclass(frozen=True)
class Suite:
    name: str
    run: SuiteRunner
    requires: tuple[str, ...] = ()
    description: str = ""

    def applies_to(self, fixture: Fixture) -> bool:
        return all(_has(fixture, need) for need in self.requires)

    def missing(self, fixture: Fixture) -> list[str]:
        return [need for need in self.requires if not _has(fixture, need)]


def _has(fixture: Fixture, need: str) -> bool:
    if need == HYPERSURFACE:
        return fixture.has_hypersurface
    if need == CONTACT:
        return fixture.has_contact
    raise ValueError(f"unknown suite requirement {need!r}")


_REGISTRY: dict[str, Suite] = {}


def register_suite(
    name: str, *, requires: Iterable[str] = ()
) -> Callable[[SuiteRunner], SuiteRunner]:
    """Register a suite runner under *name*; registration order is run order."""

    def decorator(run: SuiteRunner) -> SuiteRunner:
        doc = (run.__doc__ or "").strip().splitlines()
        _REGISTRY[name] = Suite(name, run, tuple(requires), doc[0] if doc else "")
        return run

    return decorator


def available_suites() -> list[str]:
    return list(_REGISTRY)


def get_suite(name: str) -> Suite:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownSuiteError(
            f"unknown suite {name!r}; available: {', '.join([*_REGISTRY, ALL])}"
        ) from None


def resolve(requested: Iterable[str], fixture: Fixture) -> list[Suite]:
    """Suites to run, in registry order.

    ``all`` expands to every suite that applies to the fixture; naming an
    inapplicable suite explicitly is a configuration error.
    """
    names = list(requested) or [ALL]
    chosen: set[str] = set()
    for name in names:
        if name == ALL:
            for suite in _REGISTRY.values():
                if suite.applies_to(fixture):
                    chosen.add(suite.name)
                else:
                    logger.info(
                        "skipping suite %s for %s: no %s",
                        suite.name,
                        fixture.name,
                        " or ".join(suite.missing(fixture)),
                    )
            continue
        suite = get_suite(name)
        if not suite.applies_to(fixture):
            raise ConfigurationError(
                f"suite {name!r} does not apply to fixture {fixture.name!r}: "
                f"it has no {' or '.join(suite.missing(fixture))}"
            )
        chosen.add(name)
    return [suite for suite in _REGISTRY.values() if suite.name in chosen]


# ---------------------------------------------------------------------------
# Built-in suites
# ---------------------------------------------------------------------------


def _random_fields(settings: RunSettings) -> Callable[[Site], Jet]:
    def fields(site: Site) -> Jet:
        n = site.chart.dimension
        rng = np.random.default_rng([settings.seed, 2, site.index])
        coefficients = draw_coefficients(rng, settings.random_fields, n, site.order)
        return polynomial_fields(site, Jet.constant(np.eye(n), n), coefficients)

    return fields


@register_suite("connection")
def _connection(fixture: Fixture, samples: Samples, settings: RunSettings) -> SuiteResult:
    """Statistical structure, dual connection and difference tensor."""
    return connection_suite(
        fixture.connection,
        fixture.metric,
        samples.ambient,
        difference=fixture.difference,
        declared_dual=fixture.declared_dual,
        fields=_random_fields(settings),
        degeneracy=settings.degeneracy,
    )


@register_suite("section2", requires=(HYPERSURFACE,))
def _section2(fixture: Fixture, samples: Samples, settings: RunSettings) -> SuiteResult:
    """Null frame and the Levi-Civita induced identities."""
    return suite_section2(
        fixture,
        samples.hypersurface,
        random_fields=settings.random_fields,
        seed=settings.seed,
        degeneracy=settings.degeneracy,
    )


@register_suite("section3", requires=(HYPERSURFACE,))
def _section3(fixture: Fixture, samples: Samples, settings: RunSettings) -> SuiteResult:
    """Induced objects of the dual pair on the lightlike hypersurface."""
    return suite_section3(
        fixture, samples.hypersurface, random_fields=settings.random_fields, seed=settings.seed
    )


@register_suite("contact", requires=(CONTACT,))
def _contact(fixture: Fixture, samples: Samples, settings: RunSettings) -> SuiteResult:
    """Almost contact, Sasakian and Sasakian statistical conditions."""
    assert fixture.contact is not None
    pkg = SasakiStatisticalPackage.build(
        fixture.contact,
        fixture.metric,
        fixture.connection,
        fixture.difference,
        degeneracy=settings.degeneracy,
    )
    return contact_suite(pkg, samples.ambient)


@register_suite("ssi", requires=(CONTACT, HYPERSURFACE))
def _ssi(fixture: Fixture, samples: Samples, settings: RunSettings) -> SuiteResult:
    """Screen semi-invariant structure and its conditional identities."""
    ssi = build_ssi(
        fixture, samples.hypersurface, random_fields=settings.random_fields, seed=settings.seed
    )
    result = SuiteResult("ssi")
    result.merge(f_structure_suite(ssi))
    result.merge(prop51_suite(ssi))
    result.merge(lemma52_53_suite(ssi))
    result.merge(parallel_and_geodesic_report(ssi))
    result.merge(integrability_suite(ssi, settings.tol))
    return result


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------


def run_suites(
    fixture: Fixture,
    requested: Iterable[str] = (ALL,),
    settings: RunSettings | None = None,
) -> CheckReport:
    """Run the requested suites on *fixture* and collect the judged rows."""
    settings = settings or RunSettings()
    suites = resolve(requested, fixture)
    samples = Samples(fixture, settings)
    report_settings: dict[str, object] = dict(settings.to_dict())
    if fixture.parameters:
        report_settings["parameters"] = dict(sorted(fixture.parameters.items()))
    report = CheckReport(
        fixture=fixture.name,
        suites=tuple(s.name for s in suites),
        settings=report_settings,
        sample_points=samples.points,
    )
    for suite in suites:
        started = time.perf_counter()
        result = suite.run(fixture, samples, settings)
        report.add(result.rows(settings.tol, fixture.expectations))
        logger.debug(
            "suite %s on %s: %d checks in %.3fs",
            suite.name,
            fixture.name,
            len(result.checks),
            time.perf_counter() - started,
        )
    return report


def settings_from(values: Mapping[str, object]) -> RunSettings:
    """Build :class:`RunSettings` from a flat mapping, ignoring unknown keys."""
    known = RunSettings.__dataclass_fields__
    return RunSettings(**{k: v for k, v in values.items() if k in known})  # type: ignore[arg-type]
