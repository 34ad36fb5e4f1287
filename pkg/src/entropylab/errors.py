"""Exception types raised across entropylab."""


class EntropyLabError(Exception):
    """Base class for all library errors."""


class DomainError(EntropyLabError, ValueError):
    """A point or parameter lies outside the allowed domain."""


class ConstraintViolation(EntropyLabError, ValueError):
    """Stunted parameters break a box or touching constraint."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PreconditionError(EntropyLabError, ValueError):
    """An operation was called on input outside its precondition."""


class AmbiguousSymbol(EntropyLabError):
    """A float orbit point sits within resolution of a critical point."""

    def __init__(self, message, step, critical_index=None):
        super().__init__(message)
        self.step = step
        self.critical_index = critical_index


class InadmissibleSequence(EntropyLabError, ValueError):
    """A symbol sequence is not realized by any point of the sawtooth."""

    def __init__(self, message, depth):
        super().__init__(message)
        self.depth = depth


class NoConvergence(EntropyLabError):
    """An entropy bracket did not reach the requested width."""

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class CapExceeded(EntropyLabError):
    """The lap census grew beyond its configured cap."""


class NotMarkovWithinBudget(EntropyLabError):
    """Breakpoint orbits did not close up within the iteration budget."""


class RomeInvalid(EntropyLabError, ValueError):
    """The proposed rome leaves a cycle in the complement graph."""


class EntropyZero(PreconditionError):
    """A positive-entropy construction was given a zero-entropy map."""


class EntropyAboveTarget(PreconditionError):
    """The starting map already has entropy above the requested level."""


class NotInSigma(PreconditionError):
    """The map is not a monotone (or constant) member of the sigma simplex."""


class UnknownStructure(EntropyLabError):
    """A budgeted search could not certify the structure it needs."""


class DescriptionError(EntropyLabError, ValueError):
    """A map description could not be parsed."""
