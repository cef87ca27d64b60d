"""Verification engine for statistical manifolds and their lightlike hypersurfaces."""

from .errors import LightlikeError
from .fixtures import Fixture, available, load_fixture
from .report import CheckReport, Expectations
from .suites import RunSettings, available_suites, run_suites

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "Expectations",
    "Fixture",
    "LightlikeError",
    "RunSettings",
    "available",
    "available_suites",
    "load_fixture",
    "run_suites",
]
