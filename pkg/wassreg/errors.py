"""
Error Types
Every failure raised by the package derives from WassregError
"""

from typing import Optional


class WassregError(ValueError):
    """Base class for all package errors"""


class DimensionMismatchError(WassregError):
    """Operands do not share the required shapes"""


class NotSymmetricError(WassregError):
    """Matrix asymmetry exceeds the configured tolerance"""


class NotPSDError(WassregError):
    """Matrix has an eigenvalue below the clamping threshold"""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NearSingularError(WassregError):
    """Matrix condition estimate exceeds the configured limit"""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class ConvergenceError(WassregError):
    """An iterative kernel failed to converge"""


class ModelBlowupError(WassregError):
    """A map produced non-finite values"""


class InputParseError(WassregError):
    """Malformed input file"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line
