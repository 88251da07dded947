"""Exception types raised across the package."""


class FGBoostError(Exception):
    """Base class for all package-specific errors."""


class PointValidationError(FGBoostError, ValueError):
    """A value does not satisfy the invariants of its metric space."""


class SpaceMismatchError(FGBoostError, ValueError):
    """Operands belong to different metric spaces."""


class GridMismatchError(FGBoostError, ValueError):
    """Quantile grids (or matrix dimensions) of the operands differ."""


class GeometryError(FGBoostError, ValueError):
    """The requested operation is geometrically ill-posed (e.g. antipodal
    endpoints on the sphere, where the connecting geodesic is not unique)."""


class ConvergenceError(FGBoostError, RuntimeError):
    """An iterative solver failed to converge.

    Attributes
    ----------
    n_iter : int
        Number of iterations performed before giving up.
    """

    def __init__(self, message, n_iter):
        super().__init__(f"{message} (after {n_iter} iterations)")
        self.n_iter = n_iter


class ModelFormatError(FGBoostError, ValueError):
    """A serialized model file is malformed or has an unsupported version."""


class CsvFormatError(FGBoostError, ValueError):
    """A CSV data file is malformed.

    Attributes
    ----------
    line : int or None
        1-based line number of the offending row, when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line
