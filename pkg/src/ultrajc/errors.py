"""Exception hierarchy shared by the library and the command-line front end."""


class UltraJCError(Exception):
    """Base class for all errors raised by :mod:`ultrajc`."""


class CutoffError(UltraJCError, ValueError):
    """A Fock number or coherent amplitude does not fit the truncated space."""


class DimensionMismatchError(UltraJCError, ValueError):
    pass


class ParameterError(UltraJCError, ValueError):
    """Physical parameters violate their invariants (negative frequency, ...)."""


class ConfigError(UltraJCError, ValueError):
    """Invalid propagation or experiment configuration."""


class AccuracyError(UltraJCError, RuntimeError):
    """The integrator failed its norm or local-error checks.

    ``suggested_dt`` carries a step size that is expected to cure the failure.
    """

    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class ConvergenceError(UltraJCError, RuntimeError):
    """A cutoff-doubling convergence check did not meet its tolerance."""


class DomainError(UltraJCError, ValueError):
    """Argument outside the supported envelope of a special function."""


class RegimeError(UltraJCError, ValueError):
    """Operation is undefined in the requested modulation regime."""


class NmaxTooSmallError(UltraJCError, ValueError):
    """The ground state sits in the highest manifold that was considered."""
