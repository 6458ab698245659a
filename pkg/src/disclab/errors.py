"""Exception hierarchy shared by every disclab module.

Budget and size-cap exceedances derive from :class:`BudgetError` so the CLI can
map them to their own exit code; everything else is a :class:`DomainError`.
"""

from __future__ import annotations

from typing import Any


class DiscLabError(Exception):
    """Base class for all library errors."""


class DomainError(DiscLabError):
    """Invalid input or an unmet precondition."""


class BudgetError(DiscLabError):
    """An explicit enumeration budget or brute-force cap was exceeded."""


class SizeLimitError(BudgetError):
    pass


class InvalidGraphError(DomainError):
    pass


class InvalidColouringError(DomainError):
    pass


class SpecError(DomainError):
    """Construction parameters violate a divisibility or ordering guard."""


class NoSpanningTreeError(DomainError):
    pass


class AcyclicityError(DomainError):
    pass


class InvalidLayeringError(DomainError):
    pass


class RegularityError(DomainError):
    pass


class SamplingError(DomainError):
    pass


class EmptyFamilyError(DomainError):
    pass


class StructureError(DomainError):
    pass


class CoverInvalidError(DomainError):
    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class DegreeError(DomainError):
    pass


class PreconditionError(DomainError):
    pass


class ParseError(DomainError):
    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class TheoryViolationError(DiscLabError):
    """A bound that a proven lemma guarantees has failed.

    This signals either an implementation bug or a counterexample, so the
    offending trace is carried along for inspection.
    """

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace
