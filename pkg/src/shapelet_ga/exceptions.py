"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
it to a process status without a lookup table.
"""


class ShapeletError(Exception):
    exit_code = 3


class ConfigError(ShapeletError, ValueError):
    exit_code = 1


class DataError(ShapeletError, ValueError):
    exit_code = 2


class ParseError(DataError):
    pass


class EmptyFile(DataError):
    pass


class IncompatibleDatasets(DataError):
    pass


class DegenerateInput(DataError):
    """Raised when fewer than two classes are present."""


class ShapeletTooLong(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class InsufficientData(DataError):
    pass


class InsufficientCandidates(DataError):
    pass


class InvariantViolation(ShapeletError):
    exit_code = 3
