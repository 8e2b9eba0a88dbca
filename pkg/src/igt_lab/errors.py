"""Exception types shared across the package."""


class IgtLabError(Exception):
    """Base class for all igt-lab errors."""


class ShapeError(IgtLabError):
    """Operands with incompatible shapes.

    Carries both shapes so callers can report exactly what mismatched.
    """

    def __init__(self, message: str, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class NonFiniteError(IgtLabError):
    """An array that must be finite contains nan or inf."""


class ConvergenceError(IgtLabError):
    """An iterative routine failed to converge; carries the iteration count."""

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


class DataError(IgtLabError):
    """A dataset or config file is malformed or inconsistent."""
