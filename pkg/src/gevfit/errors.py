"""Exception hierarchy shared by every gevfit module."""


class GevError(Exception):
    """Base class for all gevfit errors."""


class DomainError(GevError, ValueError):
    """An argument lies outside the domain of a function."""


class OutOfSupport(DomainError):
    """A parameter point leaves some observation with zero density."""


class ZeroShape(DomainError):
    """An operation that needs xi != 0 was called with xi == 0."""


class DegenerateData(GevError, ValueError):
    """Observations are all equal, too few, or not finite."""


class ParseError(GevError, ValueError):
    """A CSV cell could not be parsed as a finite real."""


class BracketFailure(GevError, ArithmeticError):
    """No sign change was found while bracketing a root."""


class ConvergenceFailure(GevError, ArithmeticError):
    """An iterative solver hit its iteration cap."""


class NoCandidate(GevError, ArithmeticError):
    """Every profile slice failed during the global search."""


class SingularInformation(GevError, ArithmeticError):
    """The observed information matrix is numerically singular."""


class PreconditionViolated(GevError, ValueError):
    """An experiment precondition does not hold."""
