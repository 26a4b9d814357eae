"""Exception taxonomy shared across the package.

The command line maps these onto exit codes: usage errors exit 1, data
and configuration errors exit 2, numerical degeneracies exit 3.
"""


class UsageError(Exception):
    """Malformed command-line invocation."""


class DataError(ValueError):
    """Input data outside the documented domain (bad values, bad files)."""


class ConfigError(DataError):
    """Invalid or inconsistent configuration."""


class DegenerateDirectionError(ArithmeticError):
    """A direction estimate collapsed to the zero vector."""


class InsufficientTailError(ArithmeticError):
    """Too few tail exceedances for the requested computation."""
