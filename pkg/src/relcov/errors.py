"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration / data problems exit 1,
numerical or estimation failures exit 2.
"""

__all__ = ["ConfigurationError", "DataFormatError", "NumericalError", "EstimationError"]


class ConfigurationError(ValueError):
    """Invalid parameter, option, or configuration file contents."""


class DataFormatError(ValueError):
    """Malformed input data (CSV ingestion, invalid durations, bad columns)."""


class NumericalError(RuntimeError):
    """A numerical routine failed (root bracketing, quadrature, inversion)."""


class EstimationError(RuntimeError):
    """An estimator could not produce a value (all points trimmed, zero denominators,
    non-convergence, too many failed bootstrap replicates)."""
