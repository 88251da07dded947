"""Unit-sphere points under the geodesic (great-circle) metric.

This backend hosts compositional data: a vector of proportions summing to
one maps to the positive orthant of the unit sphere via the square-root
transformation, and the arc length ``arccos(x . y)`` becomes the natural
metric.  The backend itself operates on the full sphere; when constructed
with ``positive_orthant=True`` the orthant constraint is enforced on input
validation and re-imposed by :meth:`finalize` (negative coordinates zeroed,
vector renormalized) on finished predictions only, since intermediate
transports may exit the orthant transiently.

Distances are computed with the chord form ``2*arcsin(|x - y| / 2)`` (and
its antipodal complement), which agrees with ``arccos(x . y)`` exactly but
stays accurate near zero where the arccosine of a rounded inner product
loses half the working precision.

Geodesics assume non-antipodal endpoints; antipodal pairs have no unique
geodesic and raise :class:`GeometryError`.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError, GeometryError, PointValidationError
from .base import Space, as_batch, as_point, check_weights

UNIT_NORM_TOL = 1e-12


def arc_angle(x, y) -> float:
    """Numerically stable great-circle angle between unit vectors."""
    if float(np.dot(x, y)) >= 0.0:
        chord = np.linalg.norm(x - y)
        return float(2.0 * np.arcsin(min(0.5 * chord, 1.0)))
    chord = np.linalg.norm(x + y)
    return float(np.pi - 2.0 * np.arcsin(min(0.5 * chord, 1.0)))


def arc_angle_rows(X, y) -> np.ndarray:
    """Row-wise stable angles between the rows of ``X`` and the vector ``y``."""
    dots = X @ y
    near = np.linalg.norm(X - y[None, :], axis=1)
    far = np.linalg.norm(X + y[None, :], axis=1)
    small = 2.0 * np.arcsin(np.minimum(0.5 * near, 1.0))
    large = np.pi - 2.0 * np.arcsin(np.minimum(0.5 * far, 1.0))
    return np.where(dots >= 0.0, small, large)


class SphereSpace(Space):
    """Unit vectors in ``R^dim`` with the great-circle metric."""

    name = "sphere"

    def __init__(self, dim: int, positive_orthant: bool = False, settings=None):
        super().__init__(settings)
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = int(dim)
        self.positive_orthant = bool(positive_orthant)

    def _key(self):
        return (type(self).__name__, self.dim, self.positive_orthant)

    @property
    def point_dim(self):
        return self.dim

    def describe(self):
        return {"dim": self.dim, "positive_orthant": self.positive_orthant}

    # -- contract ---------------------------------------------------------

    def validate(self, point):
        z = as_point(point, self.dim)
        if not np.all(np.isfinite(z)):
            raise PointValidationError("sphere point contains non-finite values")
        nrm = np.linalg.norm(z)
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            raise PointValidationError(f"sphere point has norm {nrm!r}, expected 1")
        if self.positive_orthant and np.any(z < -UNIT_NORM_TOL):
            raise PointValidationError("point has negative coordinates on the positive orthant")

    def _check_not_antipodal(self, a, b):
        dot = float(np.dot(a, b))
        if dot <= -1.0 + self.settings.antipodal_tol:
            raise GeometryError("endpoints are antipodal: the geodesic is not unique")

    def dist(self, a, b):
        a = as_point(a, self.dim)
        b = as_point(b, self.dim)
        self.validate(a)
        self.validate(b)
        return arc_angle(a, b)

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
        self._check_not_antipodal(a, b)
        theta = arc_angle(a, b)
        if theta < self.settings.degenerate_tol:
            return a.copy()
        rej = b - float(np.dot(a, b)) * a
        out = np.cos(t * theta) * a + np.sin(t * theta) * rej / np.linalg.norm(rej)
        return out / np.linalg.norm(out)

    def transport(self, start, end, point):
        start = as_point(start, self.dim)
        end = as_point(end, self.dim)
        point = as_point(point, self.dim)
        for z in (start, end, point):
            self.validate(z)
        self._check_not_antipodal(start, end)
        theta = arc_angle(start, end)
        if theta < self.settings.degenerate_tol:
            return point.copy()
        v_se = end - float(np.dot(start, end)) * start
        v = v_se - float(np.dot(point, v_se)) * point
        nv = np.linalg.norm(v)
        if nv < self.settings.degenerate_tol:
            return point.copy()
        out = np.cos(theta) * point + np.sin(theta) * v / nv
        return out / np.linalg.norm(out)

    def log_map(self, base, points):
        """Tangent vectors at ``base`` pointing to each row of ``points``."""
        P = as_batch(points, self.dim)
        theta = arc_angle_rows(P, base)
        rej = P - (P @ base)[:, None] * base[None, :]
        nrm = np.linalg.norm(rej, axis=1)
        safe = nrm > self.settings.degenerate_tol
        scale = np.zeros_like(theta)
        scale[safe] = theta[safe] / nrm[safe]
        return scale[:, None] * rej

    def exp_map(self, base, tangent):
        """Point reached from ``base`` along the tangent vector."""
        nrm = np.linalg.norm(tangent)
        if nrm < self.settings.degenerate_tol:
            return base.copy()
        out = np.cos(nrm) * base + np.sin(nrm) * tangent / nrm
        return out / np.linalg.norm(out)

    def mean(self, points, weights=None):
        points = as_batch(points, self.dim)
        if points.shape[0] == 0:
            raise ValueError("cannot average an empty set of points")
        for z in points:
            self.validate(z)
        w = check_weights(weights, points.shape[0])
        return self.mean_batch(points, w)

    def mean_batch(self, points, weights=None):
        points = as_batch(points, self.dim)
        w = check_weights(weights, points.shape[0])
        extrinsic = w @ points
        nrm = np.linalg.norm(extrinsic)
        x = extrinsic / nrm if nrm > self.settings.degenerate_tol else points[0].copy()
        max_iter = self.settings.mean_max_iter
        for _ in range(max_iter):
            grad = w @ self.log_map(x, points)
            if np.linalg.norm(grad) < self.settings.mean_tol:
                return x
            x = self.exp_map(x, grad)
        raise ConvergenceError("Karcher mean iteration did not converge", max_iter)

    # -- batch paths --------------------------------------------------------

    def dist2_batch(self, A, B):
        A = as_batch(A, self.dim)
        B = as_batch(B, self.dim)
        dots = np.einsum("ij,ij->i", A, B)
        near = np.linalg.norm(A - B, axis=1)
        far = np.linalg.norm(A + B, axis=1)
        small = 2.0 * np.arcsin(np.minimum(0.5 * near, 1.0))
        large = np.pi - 2.0 * np.arcsin(np.minimum(0.5 * far, 1.0))
        return np.where(dots >= 0.0, small, large) ** 2

    def transport_batch(self, start, end, points):
        points = as_batch(points, self.dim)
        start = np.asarray(start, dtype=np.float64)
        end = np.asarray(end, dtype=np.float64)
        self._check_not_antipodal(start, end)
        theta = arc_angle(start, end)
        if theta < self.settings.degenerate_tol:
            return points.copy()
        v_se = end - float(np.dot(start, end)) * start
        v = v_se[None, :] - (points @ v_se)[:, None] * points
        nv = np.linalg.norm(v, axis=1)
        out = points.copy()
        ok = nv >= self.settings.degenerate_tol
        moved = np.cos(theta) * points[ok] + np.sin(theta) * v[ok] / nv[ok, None]
        out[ok] = moved / np.linalg.norm(moved, axis=1)[:, None]
        return out

    # -- output projection --------------------------------------------------

    def finalize(self, point):
        z = as_point(point, self.dim)
        if not self.positive_orthant:
            return z
        clamped = np.maximum(z, 0.0)
        nrm = np.linalg.norm(clamped)
        if nrm < self.settings.degenerate_tol:
            raise GeometryError("prediction collapsed to the origin under the orthant clamp")
        return clamped / nrm

    def finalize_batch(self, points):
        points = as_batch(points, self.dim)
        if not self.positive_orthant:
            return points
        return np.stack([self.finalize(p) for p in points])


def simplex_to_sphere(proportions) -> np.ndarray:
    """Square-root transformation from composition rows to sphere points."""
    arr = np.asarray(proportions, dtype=np.float64)
    squeeze = arr.ndim == 1
    rows = np.atleast_2d(arr)
    if np.any(rows < -1e-12):
        raise PointValidationError("compositions must be non-negative")
    sums = rows.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-8):
        raise PointValidationError("compositions must sum to 1")
    out = np.sqrt(np.maximum(rows, 0.0) / sums[:, None])
    return out[0] if squeeze else out
