"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the region where the quantity is defined."""


class PoleError(DomainError):
    """Evaluation requested at (or numerically on top of) a singularity."""


class RangeError(ValueError):
    """Argument outside the supported numerical range."""


class OrderingError(ValueError):
    """Input sequence is not strictly ascending."""


class ResourceError(MemoryError):
    """A table could not be allocated."""


class ConsistencyError(ArithmeticError):
    """Two independent evaluation routes disagree."""


class QuadratureError(ArithmeticError):
    """Numerical integration produced an unusable result."""


class ZeroFileError(ValueError):
    """Malformed or invalid zero table."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ZeroValidationError(ZeroFileError):
    """An ingested ordinate is not close enough to a zero of zeta."""


class NearMultipleZeroError(ArithmeticError):
    """|zeta'(rho)| too small for the simple-zero coefficient formula."""


class CancellationWarning(RuntimeWarning):
    """Error term is below the rounding level of the main term."""
