"""Exception types shared across the package.

The CLI maps these onto exit codes: user/input problems exit with 2,
numeric failures and solver capacity limits exit with 3.
"""


class WtestError(Exception):
    """Base class for all package-specific errors."""


class InputError(WtestError, ValueError):
    """Invalid argument, malformed file, or out-of-range parameter."""


class ConfigurationError(InputError):
    """Invalid training configuration (widths, rates, unknown fields)."""


class DimensionError(InputError):
    """Incompatible array shapes or sample dimensions."""


class CapacityError(WtestError):
    """A problem size exceeds a configured solver budget."""


class NumericError(WtestError, ArithmeticError):
    """Non-finite values or solver failure during a computation."""
