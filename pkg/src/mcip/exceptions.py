"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class MCIPError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MCIPError, ValueError):
    """Malformed or inconsistent user input (CLI exit code 1)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(MCIPError, ArithmeticError):
    """A numerical failure: singular matrix, degenerate fit, non-convergence (exit code 2)."""


class DegenerateFitError(NumericError):
    """A fitted cell is zero where the observed count is positive."""


class SingularMatrixError(NumericError):
    """A covariance submatrix could not be inverted."""
