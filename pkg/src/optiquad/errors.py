"""Exception hierarchy shared by all optiquad modules."""


class OptiquadError(Exception):
    """Base class for every error raised by the package."""


class DomainError(OptiquadError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NondifferentiableError(DomainError):
    """A jet was requested at a point where the expression has a kink."""


class EvaluationError(OptiquadError):
    """An integrand produced a non-finite value at a quadrature node."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ParseError(OptiquadError):
    """Malformed expression text.

    ``position`` is the 0-based character offset of the offending token and
    ``expected`` the set of tokens that would have been accepted there.
    """

    def __init__(self, message, position, expected=()):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.expected = frozenset(expected)


class UnknownIdentifierError(ParseError):
    pass


class IntegrationError(OptiquadError):
    """Panel quadrature failed to reach the requested tolerance."""


class NoApplicableBoundError(OptiquadError):
    """None of the error inequalities has its inputs available."""


class ConsistencyError(OptiquadError):
    """Two independent routes to the same quantity disagree."""
