"""Exception hierarchy shared by every netctl module."""


class NetctlError(Exception):
    """Base class for all errors raised by netctl."""


class ParameterError(NetctlError, ValueError):
    """An argument lies outside its admissible range."""


class ParseError(NetctlError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionError(NetctlError, ValueError):
    pass


class DomainError(NetctlError, ValueError):
    pass


class ValidationError(NetctlError, ValueError):
    pass


class ConsistencyError(NetctlError, RuntimeError):
    """Internal invariant of a result object was violated."""


class InsufficientDataError(NetctlError, ValueError):
    pass


class NumericOverflowError(NetctlError, ArithmeticError):
    pass


class UncontrollableError(NetctlError, ArithmeticError):
    """The Gramian is singular; ``null_space`` holds the offending directions."""

    def __init__(self, message, null_space=None):
        super().__init__(message)
        self.null_space = null_space
