"""Exception hierarchy shared across the package.

Each class carries the process exit code the CLI maps it to.
"""


class HatewceError(Exception):
    exit_code = 1


class ConfigError(HatewceError, ValueError):
    """Bad configuration document or invalid constructor arguments."""

    exit_code = 2


class ArgumentError(HatewceError, ValueError):
    exit_code = 2


class DataError(HatewceError):
    """Problems with input data: missing columns, bad labels, degenerate classes."""

    exit_code = 3


class SchemaError(DataError):
    pass


class ParseError(DataError):
    pass


class InputEncodingError(DataError):
    pass


class InputError(DataError, ValueError):
    """Array inputs that do not fit the model or metric contract."""


class NumericError(HatewceError, ArithmeticError):
    exit_code = 4
