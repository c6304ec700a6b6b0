"""Exception hierarchy for rdlab."""


class RdlabError(Exception):
    """Base class for every error raised by this package."""


class NotHermitianError(RdlabError, ValueError):
    """Input matrix is not Hermitian within tolerance."""


class DomainError(RdlabError, ValueError):
    """A scalar function was evaluated outside its domain."""


class StructuralError(RdlabError, ValueError):
    """Tensor-factor metadata is missing or inconsistent."""


class DimensionError(RdlabError, ValueError):
    """Operator dimension exceeds the supported ceiling or is unsupported."""


class SingularDivisorError(RdlabError, ValueError):
    """Divisor of a matrix quotient is not positive definite."""


class InvalidChannelError(RdlabError, ValueError):
    """Kraus operators do not form a trace-preserving map."""


class ConvergenceError(RdlabError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance.

    The best iterate found is attached as ``best`` so callers can still
    inspect or use it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
