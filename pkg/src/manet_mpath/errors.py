"""Exception hierarchy shared by all modules."""


class MpathError(Exception):
    """Base class; every error carries a distinct CLI exit code."""

    exit_code = 1


class ParameterError(MpathError, ValueError):
    exit_code = 3


class DomainError(MpathError, ValueError):
    exit_code = 4


class TraceParseError(MpathError, ValueError):
    exit_code = 5

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UndefinedMetric(MpathError, ArithmeticError):
    """A session metric has no defined value (e.g. the pair never connected)."""

    exit_code = 6
