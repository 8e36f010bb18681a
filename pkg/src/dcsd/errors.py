"""Exception types shared across the package.

The CLI maps these onto process exit codes: usage errors exit with 2,
data errors with 3, anything else unexpected with 4.
"""


class UsageError(Exception):
    """Invalid configuration or API misuse (bad flag combination, wrong
    objective/estimator pairing, out-of-range parameter)."""


class DataError(Exception):
    """Problems with the input data: unreadable file, missing target
    column, malformed rows."""


class DegenerateTargetError(DataError):
    """The target column carries no usable signal for the requested
    objective (e.g. constant target where a positive global dispersion
    is required)."""
