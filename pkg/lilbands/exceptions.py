"""
Custom exceptions for the application
"""

from pathlib import Path
from typing import Any, Optional


class LilBandsError(Exception):
    """Base class for all errors raised by the package"""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class DomainError(LilBandsError, ValueError):
    """Raised when an argument lies outside the mathematical domain of a function"""

    def __init__(self, function: str, argument: str, value: Any, expected: str):
        self.function = function
        self.argument = argument
        self.value = value
        self.expected = expected
        super().__init__(f"{function}: {argument}={value!r} outside domain, expected {expected}")


class SampleValidationError(LilBandsError, ValueError):
    """Raised when a sample cannot be used as (uniform) order statistics"""


class ConvergenceError(LilBandsError, ArithmeticError):
    """Raised when an iterative evaluation (continued fraction, bracketing) does not converge"""

    def __init__(self, message: str, iterations: int = 0):
        self.iterations = iterations
        super().__init__(message)


class TableMismatchError(LilBandsError):
    """Raised when a quantile table does not match the requested key"""

    def __init__(self, message: str, found: Optional[Any] = None):
        self.found = found  # the table that was available instead, if any
        super().__init__(message)


class CacheParseError(LilBandsError):
    """Raised when a cached quantile table cannot be parsed"""

    def __init__(self, message: str, path: Path):
        self.path = path
        super().__init__(f"{path}: {message}")


class DataInputError(LilBandsError, ValueError):
    """Raised when an input data file contains an unparseable row"""

    def __init__(self, message: str, path: Optional[Path] = None, line_number: Optional[int] = None):
        self.path = path
        self.line_number = line_number
        location = f"{path}:{line_number}: " if line_number is not None else (f"{path}: " if path else "")
        super().__init__(f"{location}{message}")


class ModelSpecError(LilBandsError, ValueError):
    """Raised for an invalid CDF model specification or evaluation outside a tabulated range"""
