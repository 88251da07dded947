"""Shared numeric tolerances.

All tolerance-like constants used by the metric-space backends live in one
record so they can be overridden coherently (e.g. for stress tests) instead
of being scattered as magic numbers.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericSettings:
    """Tolerances and iteration caps for the geometric primitives.

    Attributes
    ----------
    metric_tol : float
        Slack allowed when checking metric identities (distances that are
        mathematically zero, transport round-trips).
    mean_tol : float
        Convergence threshold on the gradient norm of iterative Fréchet
        mean solvers.
    mean_max_iter : int
        Iteration cap for iterative Fréchet mean solvers.
    antipodal_tol : float
        Two unit vectors with inner product below ``-1 + antipodal_tol``
        are treated as antipodal (no unique geodesic).
    degenerate_tol : float
        Angles / tangent norms below this are treated as zero.
    """

    metric_tol: float = 1e-9
    mean_tol: float = 1e-10
    mean_max_iter: int = 100
    antipodal_tol: float = 1e-9
    degenerate_tol: float = 1e-12


DEFAULT_SETTINGS = NumericSettings()
