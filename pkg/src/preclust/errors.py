"""Exception hierarchy.

Every error the library raises derives from PreclustError. The CLI maps the
three branches to exit codes: config errors -> 2, data errors -> 3,
numerical failures -> 4.
"""


class PreclustError(Exception):
    exit_code = 1


class ConfigError(PreclustError):
    """Bad or unknown configuration (unknown keys are errors, not warnings)."""

    exit_code = 2


class DataError(PreclustError):
    exit_code = 3


class FormatError(DataError):
    """Malformed input file (missing header, non-monotone timestamps, ...)."""


class EmptyDataError(DataError):
    """An operation left no usable rows."""


class InsufficientDataError(DataError):
    """Too few rows for the requested operation."""


class DegenerateLabelsError(DataError):
    """A class required by the operation is empty."""


class MissingInputError(DataError):
    """A pipeline stage was invoked before the stage that produces its input."""


class DimensionError(DataError):
    """Shape or length mismatch between paired arguments."""


class NumericalError(PreclustError):
    exit_code = 4


class DomainError(NumericalError):
    """Argument outside the mathematical domain of a special function."""


class ParameterError(NumericalError):
    """A numeric hyperparameter is out of range for the given data."""


class NoKneeError(NumericalError):
    """The sorted-distance curve has no usable maximum-curvature point."""


class UndefinedScoreError(NumericalError):
    """Silhouette is undefined (fewer than two non-noise clusters)."""


class TuningFailureError(NumericalError):
    """Every grid point of a hyperparameter sweep produced an undefined score."""


class DegenerateStatisticsError(NumericalError):
    """A statistic requires non-zero variance and got none."""
