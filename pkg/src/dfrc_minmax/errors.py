"""Shared exception types for the allocation library."""


class ConfigError(Exception):
    """A scenario or sweep file failed to parse or validate."""


class InfeasibleError(RuntimeError):
    """No allocation can satisfy the active constraints.

    ``deficit`` carries the extra watts that would be needed, when known.
    """

    def __init__(self, message, deficit=None):
        super().__init__(message)
        self.deficit = deficit


class UnequalPayloadsError(ValueError):
    """The closed form needs identical payload terms; use alg1_delay_bisection."""


class FloorViolationError(RuntimeError):
    """An allocation breaks a per-vehicle power floor; use alg2_complementary."""


class ConvergenceError(RuntimeError):
    """The iteration budget ran out before the termination criterion was met."""
