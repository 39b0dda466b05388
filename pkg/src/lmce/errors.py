"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """A check or solve was invoked on data that violates its precondition."""


class LinearSolveError(RuntimeError):
    """The linear solver broke down or stagnated before reaching tolerance."""

    def __init__(self, message, iterations=0):
        super().__init__(message)
        self.iterations = iterations


class ConfigError(ValueError):
    """A run configuration is malformed or internally inconsistent."""
