"""Abstract contract that every metric-space backend fulfills.

A backend describes a unique geodesic space through five primitives:

* ``dist(a, b)`` -- the metric.
* ``interpolate(a, b, t)`` -- the point ``t`` of the way along the geodesic
  from ``a`` to ``b`` (constant-speed parametrization on ``[0, 1]``).
* ``transport(start, end, point)`` -- the geodesic transport map: replay the
  displacement of the geodesic ``start -> end`` from ``point``.  It must send
  ``start`` to ``end``.
* ``mean(points, weights)`` -- the (weighted) Fréchet mean.
* ``validate(point)`` -- raise unless ``point`` satisfies the backend's
  invariants.

Points are encoded as 1-D float64 arrays of length ``point_dim``; batches are
2-D arrays with one point per row.  All operations are pure functions over
immutable values and are safe to call concurrently.
"""

from __future__ import annotations

import abc

import numpy as np

from ..config import DEFAULT_SETTINGS, NumericSettings
from ..errors import GridMismatchError, PointValidationError


def as_point(value, dim=None):
    """Coerce ``value`` to a 1-D float64 point array."""
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim != 1:
        raise PointValidationError(
            f"expected a 1-D point encoding, got shape {arr.shape}"
        )
    if dim is not None and arr.shape[0] != dim:
        raise GridMismatchError(
            f"point has length {arr.shape[0]}, expected {dim}"
        )
    return arr


def as_batch(values, dim=None):
    """Coerce ``values`` to a 2-D float64 array of points (rows)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise PointValidationError(
            f"expected a batch of point rows, got shape {arr.shape}"
        )
    if dim is not None and arr.shape[1] != dim:
        raise GridMismatchError(
            f"points have length {arr.shape[1]}, expected {dim}"
        )
    return arr


def check_weights(weights, n):
    """Validate convex weights; ``None`` means uniform."""
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"weights have shape {w.shape}, expected ({n},)")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    total = w.sum()
    if not np.isclose(total, 1.0, atol=1e-8):
        raise ValueError(f"weights must sum to 1, got {total!r}")
    return w / total


class Space(abc.ABC):
    """Backend for one unique geodesic space."""

    name: str = "abstract"

    def __init__(self, settings: NumericSettings | None = None):
        self.settings = settings or DEFAULT_SETTINGS

    # -- identity ---------------------------------------------------------

    def _key(self):
        """Hashable identity of the space (class name plus parameters)."""
        return (type(self).__name__,)

    def __eq__(self, other):
        return isinstance(other, Space) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.describe().items())
        return f"{type(self).__name__}({params})"

    @property
    @abc.abstractmethod
    def point_dim(self) -> int:
        """Length of the flat point encoding."""

    @abc.abstractmethod
    def describe(self) -> dict:
        """JSON-serializable parameters (inverse of the registry factory)."""

    # -- contract ---------------------------------------------------------

    @abc.abstractmethod
    def dist(self, a, b) -> float:
        """Distance between two points."""

    @abc.abstractmethod
    def interpolate(self, a, b, t: float) -> np.ndarray:
        """Constant-speed geodesic point: ``t=0`` gives ``a``, ``t=1`` gives ``b``."""

    @abc.abstractmethod
    def transport(self, start, end, point) -> np.ndarray:
        """Transport ``point`` along the geodesic from ``start`` to ``end``."""

    @abc.abstractmethod
    def mean(self, points, weights=None) -> np.ndarray:
        """Weighted Fréchet mean of the rows of ``points``."""

    @abc.abstractmethod
    def validate(self, point) -> None:
        """Raise :class:`PointValidationError` unless ``point`` is valid."""

    # -- batch helpers (performance paths; skip per-point validation) ------

    def dist2_batch(self, A, B) -> np.ndarray:
        """Row-wise squared distances between two batches."""
        A = as_batch(A, self.point_dim)
        B = as_batch(B, self.point_dim)
        return np.array(
            [self.dist(a, b) ** 2 for a, b in zip(A, B)], dtype=np.float64
        )

    def transport_batch(self, start, end, points) -> np.ndarray:
        """Transport every row of ``points`` along the geodesic ``start -> end``."""
        points = as_batch(points, self.point_dim)
        return np.stack([self.transport(start, end, p) for p in points])

    def mean_batch(self, points, weights=None) -> np.ndarray:
        """Fréchet mean of rows without per-point validation."""
        return self.mean(points, weights)

    # -- output projection --------------------------------------------------

    def finalize(self, point) -> np.ndarray:
        """Project a finished prediction onto the reporting domain.

        Identity for most spaces; the compositional sphere clamps to the
        positive orthant here and only here, so intermediate boosting states
        may leave the orthant transiently.
        """
        return as_point(point, self.point_dim)

    def finalize_batch(self, points) -> np.ndarray:
        points = as_batch(points, self.point_dim)
        return np.stack([self.finalize(p) for p in points])
