"""Exception hierarchy shared by the numerical kernel, the verification pipelines and the runner."""

from typing import Optional, Sequence


class LabError(Exception):
    """Base class for every error raised by steen-lab."""


class DomainError(LabError, ValueError):
    """An operation was asked for something outside its domain (range, grid shape, length)."""


class BranchAmbiguityError(DomainError):
    """A square root was requested at a sample whose modulus is below the zero-threshold.

    Attributes:
        abscissa (float): Grid abscissa of the offending sample.
        component (Optional[str]): Which quantity failed (e.g. 'f1', 'f2'), when known.
    """

    def __init__(self, message: str, abscissa: float, component: Optional[str] = None):
        super().__init__(message)
        self.abscissa = abscissa
        self.component = component


class SingularityError(DomainError):
    """A formula with a pole was evaluated at (or too close to) the pole.

    Attributes:
        abscissa (float): Location of the singular evaluation.
    """

    def __init__(self, message: str, abscissa: float):
        super().__init__(message)
        self.abscissa = abscissa


class IntegrationFailure(LabError, RuntimeError):
    """The ODE integrator could not complete the requested interval.

    Attributes:
        abscissa (float): Last abscissa reached before failure.
    """

    def __init__(self, message: str, abscissa: float):
        super().__init__(message)
        self.abscissa = abscissa


class GuardHalt(IntegrationFailure):
    """Integration was halted because the user-supplied guard was violated.

    Attributes:
        abscissa (float): Localized abscissa of the guard crossing.
        state (Sequence[complex]): State vector at the crossing.
    """

    def __init__(self, message: str, abscissa: float, state: Sequence[complex]):
        super().__init__(message, abscissa)
        self.state = tuple(state)


class ConfigError(LabError, ValueError):
    """A scenario document failed to load or validate.

    Attributes:
        pointer (Optional[str]): JSON pointer of the offending location ('' for the document root),
            or None when the error has no location in a document.
    """

    def __init__(self, message: str, pointer: Optional[str] = None):
        super().__init__(message)
        self.pointer = pointer


def json_pointer(location: Sequence, skip: frozenset = frozenset()) -> str:
    """Renders a pydantic error location as a JSON pointer.

    Args:
        location (Sequence): The `loc` tuple of a pydantic error.
        skip (frozenset): Location entries to drop (the tags pydantic inserts for discriminated unions).

    Returns:
        str: e.g. '/scenarios/0/potential/q1/terms'.
    """
    parts = [str(part).replace("~", "~0").replace("/", "~1") for part in location if part not in skip]
    return "".join(f"/{part}" for part in parts)
