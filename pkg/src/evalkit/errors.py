"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
CheckerError -> 3.
"""


class EvalkitError(Exception):
    """Base class for all evalkit errors."""


class ConfigError(EvalkitError):
    """Invalid configuration: bad flags, malformed config/rules files, bad regex."""


class DataError(EvalkitError):
    """Invalid input data: corpus parse failures, constraint violations."""


class CheckerError(EvalkitError):
    """Syntax-checker infrastructure failure (binary missing, sandbox error).

    Distinct from a snippet failing the check, which is a score of 0.
    """
