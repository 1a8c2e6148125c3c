"""Exception types shared across the package."""


class WindlineError(Exception):
    """Base class for windline errors.

    ``fields`` optionally names the offending input fields so callers
    (CLI, HTTP service) can produce field-anchored messages.
    """

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = list(fields)


class DomainError(WindlineError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ContractError(WindlineError, ValueError):
    """Structurally valid input that violates an interface contract."""


class CoverageError(WindlineError, ValueError):
    """Requested band or window lies outside the available data."""


class ParseError(WindlineError, ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line_number=None, fields=()):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message, fields)
        self.line_number = line_number


class NumericError(WindlineError, ArithmeticError):
    """A numerical routine failed to converge or produced non-finite values."""


class IntegrationError(NumericError):
    """Formal ray integration failed; carries the ray coordinates."""

    def __init__(self, message, p=None, x=None):
        if p is not None:
            message = f"{message} (ray p={p!r}, x={x!r})"
        super().__init__(message)
        self.p = p
        self.x = x
