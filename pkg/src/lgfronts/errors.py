"""Exception types raised by the solver and its companion tools.

Every error that callers are expected to catch is a subclass of
``LGFrontsError`` so that CLI code can map the whole family onto a
single exit code.
"""

from __future__ import annotations

from dataclasses import dataclass


class LGFrontsError(Exception):
    """Base class for all package errors."""


# ----------------------------------------------------------------------
# validation

NONPOSITIVE_PARAMETER = "NonPositiveParameter"
INITIAL_PROFILE = "InitialProfileViolation"


@dataclass(frozen=True)
class Violation:
    kind: str          # NONPOSITIVE_PARAMETER or INITIAL_PROFILE
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}({self.field}): {self.message}"


class ConstraintViolation(LGFrontsError):
    """One or more model constraints failed validation.

    Carries the full list so a caller sees every problem at once rather
    than fixing them one by one.
    """

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NoPositiveEquilibrium(LGFrontsError):
    """The saturating kernel admits no positive coexistence state."""


# ----------------------------------------------------------------------
# geometry / transform

class DegenerateInterval(LGFrontsError):
    """Front interval has non-positive width."""


class GridTooSmall(LGFrontsError):
    """Fewer grid nodes than the stencil needs."""


# ----------------------------------------------------------------------
# solver

class DomainTooSmall(LGFrontsError):
    """Truncation half-width does not leave room for the fronts."""


class CflViolation(LGFrontsError):
    """Time step exceeds the advection stability bound."""


class FrontNearTruncation(LGFrontsError):
    """A front moved to within the safety margin of the truncated domain."""


class BoundBlowup(LGFrontsError):
    """A field left its a priori sup bound by more than the tolerance."""


class NonmonotoneFronts(LGFrontsError):
    """Front speed has the wrong sign beyond stencil-error tolerance."""


# ----------------------------------------------------------------------
# analysis

class AssumptionViolated(LGFrontsError):
    """An analytic precondition (e.g. b < 1) does not hold."""


class WindowOutsideFronts(LGFrontsError):
    """Requested reporting window is not contained in the predator range."""


class WitnessInvalid(LGFrontsError):
    """Decay witness fails its initial domination requirement."""


class IncomparableRuns(LGFrontsError):
    """Two runs do not satisfy the ordering preconditions."""


# ----------------------------------------------------------------------
# sweep

class NoBracket(LGFrontsError):
    """Endpoint expansion exhausted without a valid sign bracket."""


class RunCapExceeded(LGFrontsError):
    """Grid request would exceed the configured run cap."""


# ----------------------------------------------------------------------
# io

class ConfigSyntaxError(LGFrontsError):
    """Config text failed to parse; carries position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        else:
            where = ""
        super().__init__(message + where)


class UnknownKey(LGFrontsError):
    """Config contains a key the schema does not define."""
