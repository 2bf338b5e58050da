"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CondIndError(Exception):
    """Base class for every error raised by this package."""


class ParseError(CondIndError):
    """Scenario file is not syntactically valid JSON."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ValidationError(CondIndError):
    """A structural invariant was violated (null atom, bad partition, ...)."""


class SpaceMismatchError(ValidationError):
    """Two objects built over different probability spaces were combined."""


class CapExceededError(CondIndError):
    """Event enumeration would exceed the configured cell cap."""

    def __init__(self, cells: int, cap: int):
        super().__init__(f"partition has {cells} cells, enumeration cap is {cap}")
        self.cells = cells
        self.cap = cap


class MixedTargetsError(ValidationError):
    """Indicators in a family do not share the same target partition."""


class NotMonotoneError(CondIndError):
    """Operation requires the `increasing` flag on the indicator."""


class NotIncreasingError(NotMonotoneError):
    """Risk-measure construction requires an increasing indicator."""


class NotRegularError(CondIndError):
    """Cellwise computation requires the `regular` flag on the indicator."""


class EmptyDomainError(CondIndError):
    """Combined indicator would have an empty domain."""


class DomainViolationError(CondIndError):
    """Argument lies outside the indicator's declared domain."""


class GridTooLargeError(CondIndError):
    """Candidate enumeration budget exceeded in projection_solve."""


class BadDensityError(ValidationError):
    """Density fails nonnegativity or one of its normalization conditions."""


class HypothesisFailedError(CondIndError):
    """Density recovery hypotheses (additivity / self-duality) falsified."""

    def __init__(self, failed: tuple[str, ...], reports=()):
        super().__init__("hypothesis failed: " + ", ".join(failed))
        self.failed = failed
        self.reports = tuple(reports)


class UnknownCommandError(CondIndError):
    """CLI verb is not recognized."""


class UnknownNameError(CondIndError):
    """A scenario name (variable, partition, indicator, time) did not resolve."""
