"""
Error Types
Exception hierarchy shared by the library and the command-line interface.
Each class carries the process exit code the CLI uses when it escapes a command.
"""

from typing import Optional, Tuple


class MultiNetError(Exception):
    """Base class for all multinet errors."""
    exit_code = 1


class ArgumentError(MultiNetError, ValueError):
    """A caller passed a value outside the operation's contract."""
    exit_code = 2


class InfeasibleParametersError(ArgumentError):
    """Generator parameters that cannot be realised as edge probabilities."""


class DataError(MultiNetError):
    """Input data could not be read or failed validation."""
    exit_code = 3


class TensorParseError(DataError, ValueError):
    """Malformed tensor or label file."""

    def __init__(self, message: str, line_number: Optional[int] = None, path: Optional[str] = None):
        self.line_number = line_number
        self.path = path
        location = ''
        if path:
            location = f"{path}:"
        if line_number is not None:
            location = f"{location}{line_number}: "
        elif location:
            location = f"{location} "
        super().__init__(f"{location}{message}")


class DatasetValidationError(DataError):
    """A loaded tensor does not match the declared dataset's shape."""

    def __init__(self, name: str, expected: Tuple[int, ...], found: Tuple[int, ...]):
        self.name = name
        self.expected = tuple(expected)
        self.found = tuple(found)
        super().__init__(
            f"Dataset '{name}' expects dims {self.expected}, found {self.found}"
        )


class TensorIOError(DataError):
    """Filesystem failure while reading or writing an artifact."""


class NumericalError(MultiNetError, ArithmeticError):
    """Non-finite values appeared during an iterative fit."""
    exit_code = 4

    def __init__(self, message: str, iteration: Optional[int] = None):
        self.iteration = iteration
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
