"""Exception hierarchy shared by the numerics modules and the CLI."""


class GupError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GupError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(GupError, ValueError):
    """An input violates a documented precondition (e.g. unnormalized state)."""


class UnsupportedInputError(GupError, ValueError):
    pass


class IncompleteInputError(GupError, ValueError):
    pass


class NumericError(GupError, RuntimeError):
    """A numerical procedure failed; ``diagnostics`` carries the details."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class DegenerateConfigurationError(NumericError):
    """Every term of a primed spectral sum was excluded."""


class ScenarioError(GupError):
    """Scenario file failed to parse or validate.

    ``line`` is the 1-based line the problem is anchored to, or ``None`` when
    the problem concerns the file as a whole (e.g. a missing key).
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)
