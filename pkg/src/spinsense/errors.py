"""Exception types shared across the package.

All errors raised deliberately by this package derive from SpinsenseError,
so callers can catch the package's failures without masking genuine bugs.
"""


class SpinsenseError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(SpinsenseError, ValueError):
    """An argument is out of range, malformed, or inconsistent."""


class DegenerateProbe(SpinsenseError):
    """A probe-state construction produced a (near-)zero vector."""


class NumericalError(SpinsenseError):
    """An integrator or decomposition failed to reach its tolerance."""


class AssumptionViolated(SpinsenseError):
    """A model assumption (e.g. field parallel to the noise axis) does not hold."""


class SingularQfim(SpinsenseError):
    """The quantum Fisher information matrix is singular or too ill-conditioned to invert."""


class ExperimentFailed(SpinsenseError):
    """A sweep or scan produced no usable points."""
