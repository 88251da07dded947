"""One-dimensional distributions under the 2-Wasserstein metric.

A distribution is encoded by its quantile function sampled on the midpoint
grid ``p_k = (2k - 1) / (2m)`` for ``k = 1..m`` (``m`` defaults to 100): a
non-decreasing vector ``q`` with ``q[k-1] = Q(p_k)``.  With this encoding

* the squared distance is the midpoint-rule discretization of
  ``\\int_0^1 (Q_a(p) - Q_b(p))^2 dp``, i.e. the mean of squared
  entry differences,
* geodesics are entrywise linear interpolations of quantile vectors
  (the 1-D displacement interpolation),
* the geodesic transport map composes quantile functions:
  ``Q_out = Q_end . F_start . Q_point``, where ``F_start`` is the
  piecewise-linear CDF obtained by inverting the start grid.

CDF inversion convention: queries outside the grid's value range clamp to
the first/last grid probability; a query that hits a flat run of equal grid
values (an atom) maps to the midpoint of the run's probability interval.
Atoms therefore break the exact transport identity ``T(start) = end``; the
identity holds exactly on strictly increasing grids.
"""

from __future__ import annotations

import numpy as np

from ..errors import GridMismatchError, PointValidationError
from .base import Space, as_batch, as_point, check_weights

MONOTONE_SLACK = 1e-12


def midpoint_grid(m: int) -> np.ndarray:
    """Probability grid ``p_k = (2k - 1) / (2m)``, ``k = 1..m``."""
    return (2.0 * np.arange(1, m + 1) - 1.0) / (2.0 * m)


def pwl_evaluate(knots_x, knots_y, queries):
    """Evaluate the monotone piecewise-linear map defined by sorted knots.

    Queries below ``knots_x[0]`` (above ``knots_x[-1]``) return ``knots_y[0]``
    (``knots_y[-1]``).  A query equal to a run of tied knot values
    ``knots_x[k1] == ... == knots_x[k2]`` returns ``knots_y[j]`` when
    ``k1 + k2`` is even (``j = (k1 + k2) // 2``) and the average of
    ``knots_y[j]`` and ``knots_y[j + 1]`` otherwise; this realizes the
    midpoint-of-the-flat-interval rule for both CDF inversion and quantile
    lookup in one pass, and returns exact knot values on strict grids.
    """
    x = np.asarray(queries, dtype=np.float64)
    shape = x.shape
    x = x.ravel()
    m = knots_x.size
    lo = np.searchsorted(knots_x, x, side="left")
    hi = np.searchsorted(knots_x, x, side="right")
    out = np.empty_like(x)

    below = hi == 0
    above = lo == m
    exact = lo < hi
    interior = ~(below | above | exact)

    out[below] = knots_y[0]
    out[above] = knots_y[-1]
    if np.any(exact):
        s = lo[exact] + hi[exact] - 1  # k1 + k2
        j = s // 2
        mid = 0.5 * (knots_y[j] + knots_y[np.minimum(j + 1, m - 1)])
        out[exact] = np.where(s % 2 == 0, knots_y[j], mid)
    if np.any(interior):
        j = lo[interior] - 1
        xj = knots_x[j]
        w = (x[interior] - xj) / (knots_x[j + 1] - xj)
        out[interior] = knots_y[j] + w * (knots_y[j + 1] - knots_y[j])
    return out.reshape(shape)


def pav_nondecreasing(values):
    """Pool-adjacent-violators projection onto non-decreasing sequences.

    Returns the input array unchanged (no copy) when already monotone.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size <= 1 or np.all(np.diff(v) >= 0.0):
        return v
    out = v.copy()
    # block-merge PAV: level[j], weight[j] per active block
    levels = np.empty(v.size)
    widths = np.empty(v.size, dtype=np.int64)
    nblocks = 0
    for value in out:
        levels[nblocks] = value
        widths[nblocks] = 1
        nblocks += 1
        while nblocks > 1 and levels[nblocks - 2] > levels[nblocks - 1]:
            total = widths[nblocks - 2] + widths[nblocks - 1]
            pooled = (
                levels[nblocks - 2] * widths[nblocks - 2]
                + levels[nblocks - 1] * widths[nblocks - 1]
            ) / total
            nblocks -= 1
            levels[nblocks - 1] = pooled
            widths[nblocks - 1] = total
    pos = 0
    for j in range(nblocks):
        out[pos : pos + widths[j]] = levels[j]
        pos += widths[j]
    return out


def quantile_from_sample(observations, m: int = 100) -> np.ndarray:
    """Empirical quantile grid of a real sample.

    Order statistic ``x_(j)`` is placed at probability ``(2j - 1) / (2n)``
    and the grid is filled by linear interpolation between adjacent order
    statistics, clamped to the extremes outside that range.  The result is
    invariant under permutations of the sample, and equals the sorted sample
    itself when ``len(observations) == m``.
    """
    obs = np.asarray(observations, dtype=np.float64).ravel()
    if obs.size == 0:
        raise ValueError("cannot build a quantile grid from an empty sample")
    if not np.all(np.isfinite(obs)):
        raise ValueError("sample contains non-finite values")
    srt = np.sort(obs)
    if srt.size == 1:
        return np.full(m, srt[0])
    return np.interp(midpoint_grid(m), midpoint_grid(srt.size), srt)


class WassersteinSpace(Space):
    """Quantile-grid distributions with the 2-Wasserstein metric."""

    name = "wasserstein"

    def __init__(self, grid_size: int = 100, support=None, settings=None):
        super().__init__(settings)
        if grid_size < 1:
            raise ValueError("grid_size must be >= 1")
        self.grid_size = int(grid_size)
        self.support = None if support is None else (float(support[0]), float(support[1]))
        self.p_grid = midpoint_grid(self.grid_size)

    def _key(self):
        return (type(self).__name__, self.grid_size, self.support)

    @property
    def point_dim(self):
        return self.grid_size

    def describe(self):
        return {"grid_size": self.grid_size, "support": self.support}

    # -- contract ---------------------------------------------------------

    def validate(self, point):
        q = as_point(point, self.grid_size)
        if not np.all(np.isfinite(q)):
            raise PointValidationError("quantile grid contains non-finite values")
        if np.any(np.diff(q) < -MONOTONE_SLACK):
            raise PointValidationError("quantile grid is not non-decreasing")
        if self.support is not None:
            lo, hi = self.support
            if q[0] < lo - MONOTONE_SLACK or q[-1] > hi + MONOTONE_SLACK:
                raise PointValidationError(
                    f"quantile grid exits the support bounds [{lo}, {hi}]"
                )

    def dist(self, a, b):
        a = as_point(a, self.grid_size)
        b = as_point(b, self.grid_size)
        self.validate(a)
        self.validate(b)
        return float(np.sqrt(np.mean((a - b) ** 2)))

    def interpolate(self, a, b, t):
        a = as_point(a, self.grid_size)
        b = as_point(b, self.grid_size)
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
        start = as_point(start, self.grid_size)
        end = as_point(end, self.grid_size)
        point = as_point(point, self.grid_size)
        for q in (start, end, point):
            self.validate(q)
        if np.array_equal(start, end):
            # the degenerate geodesic transports as the identity map; the
            # grid composition would clamp outside the start grid's range
            return point.copy()
        out = self._transport_raw(start, end, point)
        out = pav_nondecreasing(out)
        if self.support is not None:
            out = np.clip(out, self.support[0], self.support[1])
        return out

    def _transport_raw(self, start, end, queries):
        # Q_end(F_start(x)): the composition of two piecewise-linear maps with
        # breakpoints at the start grid is the single piecewise-linear map
        # sending start[k] -> end[k].
        return pwl_evaluate(start, end, queries)

    def mean(self, points, weights=None):
        points = as_batch(points, self.grid_size)
        if points.shape[0] == 0:
            raise ValueError("cannot average an empty set of points")
        for q in points:
            self.validate(q)
        w = check_weights(weights, points.shape[0])
        return w @ points

    # -- batch paths --------------------------------------------------------

    def dist2_batch(self, A, B):
        A = as_batch(A, self.grid_size)
        B = as_batch(B, self.grid_size)
        return np.mean((A - B) ** 2, axis=1)

    def transport_batch(self, start, end, points):
        points = as_batch(points, self.grid_size)
        start = np.asarray(start, dtype=np.float64)
        end = np.asarray(end, dtype=np.float64)
        if np.array_equal(start, end):
            return points.copy()
        out = self._transport_raw(start, end, points)
        diffs = np.diff(out, axis=1)
        if np.any(diffs < 0):
            out = np.stack([pav_nondecreasing(row) for row in out])
        if self.support is not None:
            out = np.clip(out, self.support[0], self.support[1])
        return out

    def mean_batch(self, points, weights=None):
        points = as_batch(points, self.grid_size)
        w = check_weights(weights, points.shape[0])
        return w @ points
