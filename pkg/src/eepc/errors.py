"""Exception types raised by the integrators, systems and experiment harness."""


class EEPCError(Exception):
    """Base class for all package errors."""


class UnsupportedStageCount(EEPCError, ValueError):
    pass


class NonConvergence(EEPCError, RuntimeError):
    """The implicit stage iteration did not reach its tolerance.

    ``step`` is filled in by the trajectory driver when known.
    """

    def __init__(self, residual, max_iter, step=None):
        self.residual = residual
        self.max_iter = max_iter
        self.step = step
        where = "" if step is None else f" at step {step}"
        super().__init__(
            f"stage iteration failed to converge{where}: "
            f"residual {residual:.3e} after {max_iter} iterations"
        )


class DimensionMismatch(EEPCError, ValueError):
    pass


class GridTooSmall(EEPCError, ValueError):
    pass


class MissingSeed(EEPCError, ValueError):
    pass


class NonPositiveInvariant(EEPCError, ValueError):
    """Raised when a log-ratio residual is undefined for the invariant values."""


class ConfigError(EEPCError, ValueError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
