"""Exception types shared across the package."""


class GazewarpError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GazewarpError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DegenerateInputError(GazewarpError, ValueError):
    """Geometrically degenerate input (zero-length vector, coincident points)."""


class SequencingError(GazewarpError):
    """Timestamps or messages arrived out of order."""


class ConsistencyError(GazewarpError):
    """Referenced entity (object id, binding member) does not exist."""


class ConfigError(GazewarpError, ValueError):
    """Invalid configuration value."""


class SchemaError(GazewarpError, ValueError):
    """A document does not match its declared schema."""

    def __init__(self, message: str, *, path: str | None = None, field: str | None = None):
        detail = message
        if path is not None:
            detail = f"{path}: {detail}"
        if field is not None:
            detail = f"{detail} (field: {field})"
        super().__init__(detail)
        self.path = path
        self.field = field


class TraceParseError(GazewarpError, ValueError):
    """A trace file line could not be parsed."""

    def __init__(self, message: str, *, line: int, path: str | None = None):
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.path = path


class IncompleteTrialError(GazewarpError):
    """An event log is missing its ObjectAppear/TrialComplete bracket."""


class MalformedLogError(GazewarpError):
    """An event log violates ordering or pairing rules."""
