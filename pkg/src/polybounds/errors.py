"""Exception types shared across the package."""


class PolyboundsError(Exception):
    """Base class for all package-specific errors."""


class ArgumentError(PolyboundsError, ValueError):
    """Bad argument: dimension mismatch, invalid range, unsupported option."""


class SchemaError(ArgumentError):
    """Malformed input file.  `path` points at the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class SolverError(PolyboundsError, RuntimeError):
    """An iterative kernel failed to converge within its budget."""


class EmptyParameterSetError(SolverError):
    """No parameter point passed the membership test; the marginal supremum
    is undefined at this x."""
