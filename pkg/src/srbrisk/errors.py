"""Exception hierarchy shared by the parsers, validators and the engine."""


class SRBError(Exception):
    """Base class for every error raised by srbrisk."""


class ParseError(SRBError, ValueError):
    """Malformed input text. ``lineno`` is 1-based, or None when unknown."""

    def __init__(self, message, lineno=None, source=None):
        self.message = message
        self.lineno = lineno
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class UnsupportedFormatError(ParseError):
    """Input is well formed but uses a feature we do not handle
    (multi-mode jobs, non-renewable resources)."""


class ValidationError(SRBError, ValueError):
    """Parsed data violates a structural invariant (cycle, duplicate id, ...)."""


class ScheduleError(SRBError, ValueError):
    """A schedule does not structurally match its instance."""


class InfeasibleScheduleError(SRBError):
    """Raised when an operation needs a feasible schedule and got one that is not."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnschedulableError(SRBError):
    """The schedule generator cannot place an activity (demand above capacity)."""
