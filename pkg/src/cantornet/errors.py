"""Exception hierarchy shared by the cantornet modules."""


class CantorNetError(Exception):
    """Base class for all package errors."""


class ParameterError(CantorNetError, ValueError):
    """A parameter lies outside the range an operation accepts."""


class DomainError(CantorNetError, ValueError):
    """A function was evaluated outside its domain."""


class ConvergenceError(CantorNetError):
    """Power iteration stopped before reaching the requested tolerance."""

    def __init__(self, message, best=None, residual=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.iterations = iterations


class NotOnLineError(DomainError):
    """A state is too far from the invariant ray to be projected onto it."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class CaptureError(CantorNetError):
    """The discontinuity was not captured by the tracked interval within max_k steps."""

    def __init__(self, message, steps=None):
        super().__init__(message)
        self.steps = steps
