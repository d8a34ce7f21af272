"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Invalid input: bad graph, out-of-range parameter, malformed config."""


class DegenerateSchedulingError(ValidationError):
    """Raised when the sleep chain has no stationary split (u = v = 0) or v = 0
    where a ratio u/v is required."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap.

    The last iterate and its residual are kept so the caller can inspect them
    or retry with a larger cap.
    """

    def __init__(self, message, last_iterate=None, residual=float("nan")):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
