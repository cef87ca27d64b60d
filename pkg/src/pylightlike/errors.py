from __future__ import annotations

from collections.abc import Sequence


class LightlikeError(Exception):
    """Base class for pylightlike errors."""


# ---------------------------------------------------------------------------
# Expression language
# ---------------------------------------------------------------------------


class ExprSyntaxError(LightlikeError):
    """Raised when an expression string does not match the grammar."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownSymbolError(ExprSyntaxError):
    """Raised when an expression names an undeclared coordinate or parameter."""

    def __init__(self, name: str, offset: int) -> None:
        super().__init__(f"unknown symbol {name!r}", offset)
        self.name = name


class ExprDomainError(LightlikeError):
    """Raised when evaluation leaves the domain of an operation."""

    def __init__(self, message: str, subexpression: str) -> None:
        super().__init__(f"{message}: {subexpression}")
        self.subexpression = subexpression


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


class SingularMetricError(LightlikeError):
    """Raised when a metric is degenerate where it must be invertible."""


class SamplingError(LightlikeError):
    """Raised when a validity region rejects every candidate point."""


class _SpectrumError(LightlikeError):
    def __init__(self, message: str, singular_values: Sequence[float]) -> None:
        values = ", ".join(f"{v:.3e}" for v in singular_values)
        super().__init__(f"{message} (singular values: {values})")
        self.singular_values = tuple(float(v) for v in singular_values)


class NotLightlikeError(_SpectrumError):
    """Raised when the induced metric has no radical."""


class DegeneracyTooHighError(_SpectrumError):
    """Raised when the induced metric has a radical of rank two or more."""


class SingularScreenError(LightlikeError):
    """Raised when the screen Gram matrix is degenerate."""


class NoRealSolutionError(LightlikeError):
    """Raised when the transversal normalization has no real root."""

    def __init__(self, a: float, b: float, c: float) -> None:
        super().__init__(
            f"normalization {a:.6g}*t^2 + {b:.6g}*t + {c:.6g} = 0 has no real solution"
        )
        self.coefficients = (a, b, c)


class DecompositionError(LightlikeError):
    """Raised when a tangential part is not tangent to the hypersurface."""


class NotScreenSemiInvariantError(LightlikeError):
    """Raised when phi~ does not map the radical and transversal into the screen."""


# ---------------------------------------------------------------------------
# Fixtures, suites and configuration
# ---------------------------------------------------------------------------


class FixtureSchemaError(LightlikeError):
    """Raised when a fixture document violates the schema."""


class UnknownFixtureError(LightlikeError):
    """Raised when a fixture name is not registered."""

    def __init__(self, name: str, available: Sequence[str]) -> None:
        super().__init__(
            f"unknown fixture {name!r}; available: {', '.join(sorted(available))}"
        )
        self.name = name
        self.available = tuple(sorted(available))


class BootstrapValidationError(LightlikeError):
    """Raised when a declared object fails its validation at a bootstrap point."""

    def __init__(self, check: str, point: Sequence[float], residual: float) -> None:
        coords = ", ".join(f"{c:.6g}" for c in point)
        super().__init__(f"{check} failed at ({coords}) with residual {residual:.3e}")
        self.check = check
        self.point = tuple(float(c) for c in point)
        self.residual = float(residual)


class UnknownSuiteError(LightlikeError):
    """Raised when a suite name is not registered."""


class ConfigurationError(LightlikeError):
    """Raised for invalid settings or a suite that does not apply to a fixture."""
