"""Exception types shared across the toolkit.

Every error carries a short machine-readable ``kind`` slug plus a human
detail string; the CLI renders them as ``error: <kind>: <detail>`` and maps
the class to its exit code.
"""


class ToolError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2

    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


class UsageError(ToolError):
    """Bad invocation: unknown flags, invalid flag values (exit code 1)."""

    exit_code = 1


class DataError(ToolError):
    """Malformed input data or violated operation precondition (exit code 2)."""

    exit_code = 2


class ParseError(DataError):
    """Unreadable stream content; names the offending line when known."""

    def __init__(self, kind: str, detail: str, line: int | None = None):
        if line is not None:
            detail = f"line {line}: {detail}"
        super().__init__(kind, detail)
        self.line = line


class NumericalError(ToolError):
    """A numerical routine failed to converge (exit code 3)."""

    exit_code = 3


class NonUniqueRotationWarning(UserWarning):
    """The fitted rotation is not unique (rank-deficient cross-covariance)."""
