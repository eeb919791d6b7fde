"""Exception hierarchy.

Configuration problems and numerical failures are kept apart so that the
command-line front end can map them to different exit codes.
"""


class CountstatsError(Exception):
    """Base class for all package errors."""


class ConfigError(CountstatsError, ValueError):
    """Invalid parameters, malformed configuration or unusable paths."""


class DimensionError(CountstatsError, ValueError):
    """Operands live on incompatible Hilbert or Liouville spaces."""


class NumericalError(CountstatsError, ArithmeticError):
    """A numerical routine could not deliver a result within tolerance."""


class PropagationError(NumericalError):
    """Matrix exponential produced non-finite entries."""


class DegenerateSteadyStateError(NumericalError):
    """The generator has more than one stationary state."""


class ZeroIntensityError(NumericalError):
    """A normalised correlation was requested for a state with no emission."""


class EigenvalueCrossingError(NumericalError):
    """The tracked counting-field eigenvalue lost continuity."""


class NonConvergentTailError(NumericalError):
    """A correlation integrand does not decay fast enough to integrate."""
