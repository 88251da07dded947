"""Euclidean vectors: the oracle backend.

Plain ``R^d`` with the usual distance.  Geodesics are line segments and the
transport map is the translation ``point + (end - start)``, so boosting in
this space collapses to classical vector-valued gradient boosting; the test
suite exploits this to check the geodesic machinery against scalar
implementations.
"""

from __future__ import annotations

import numpy as np

from ..errors import PointValidationError
from .base import Space, as_batch, as_point, check_weights


class EuclideanSpace(Space):
    """``R^dim`` with the Euclidean metric."""

    name = "euclidean"

    def __init__(self, dim: int, settings=None):
        super().__init__(settings)
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)

    def _key(self):
        return (type(self).__name__, self.dim)

    @property
    def point_dim(self):
        return self.dim

    def describe(self):
        return {"dim": self.dim}

    def validate(self, point):
        v = as_point(point, self.dim)
        if not np.all(np.isfinite(v)):
            raise PointValidationError("vector contains non-finite values")

    def dist(self, a, b):
        a = as_point(a, self.dim)
        b = as_point(b, self.dim)
        self.validate(a)
        self.validate(b)
        return float(np.linalg.norm(a - b))

    def interpolate(self, a, b, t):
        a = as_point(a, self.dim)
        b = as_point(b, self.dim)
        self.validate(a)
        self.validate(b)
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"interpolation parameter t={t} outside [0, 1]")
        if t == 0.0:
            return a.copy()
        if t == 1.0:
            return b.copy()
        return (1.0 - t) * a + t * b

    def transport(self, start, end, point):
        start = as_point(start, self.dim)
        end = as_point(end, self.dim)
        point = as_point(point, self.dim)
        for v in (start, end, point):
            self.validate(v)
        return point + (end - start)

    def mean(self, points, weights=None):
        points = as_batch(points, self.dim)
        if points.shape[0] == 0:
            raise ValueError("cannot average an empty set of points")
        for v in points:
            self.validate(v)
        w = check_weights(weights, points.shape[0])
        return w @ points

    def dist2_batch(self, A, B):
        A = as_batch(A, self.dim)
        B = as_batch(B, self.dim)
        d = A - B
        return np.einsum("ij,ij->i", d, d)

    def transport_batch(self, start, end, points):
        points = as_batch(points, self.dim)
        delta = np.asarray(end, dtype=np.float64) - np.asarray(start, dtype=np.float64)
        return points + delta[None, :]

    def mean_batch(self, points, weights=None):
        points = as_batch(points, self.dim)
        w = check_weights(weights, points.shape[0])
        return w @ points
