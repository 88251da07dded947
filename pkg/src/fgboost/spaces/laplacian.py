"""Graph Laplacians of weighted undirected networks under the Frobenius metric.

A network on ``l`` nodes with non-negative edge weights ``w_uv`` is encoded
by its graph Laplacian: the symmetric ``l x l`` matrix with off-diagonal
entries ``-w_uv`` and diagonal entries equal to the node degrees, so every
row sums to zero.  Points are flattened row-major to vectors of length
``l**2``.

The space is flat: geodesics are straight line segments and the transport
map is the translation ``point + (end - start)``.  A translation may leave
the Laplacian cone (an edge weight may go negative or exceed the bound), so
transports are followed by a feasibility projection: off-diagonals are
clipped to ``[-weight_bound, 0]`` (or ``(-inf, 0]`` when no bound is set)
and each diagonal entry is rebuilt as the negative sum of its row's
off-diagonals.  Symmetry is preserved exactly because all inputs are
symmetric.
"""

from __future__ import annotations

import numpy as np

from ..errors import PointValidationError
from .base import Space, as_batch, as_point, check_weights

ROW_SUM_TOL = 1e-12


class LaplacianSpace(Space):
    """Graph Laplacians with the Frobenius metric."""

    name = "laplacian"

    def __init__(self, n_nodes: int, weight_bound=None, settings=None):
        super().__init__(settings)
        if n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        if weight_bound is not None and weight_bound <= 0:
            raise ValueError("weight_bound must be positive when set")
        self.n_nodes = int(n_nodes)
        self.weight_bound = None if weight_bound is None else float(weight_bound)
        self._offdiag = ~np.eye(self.n_nodes, dtype=bool)

    def _key(self):
        return (type(self).__name__, self.n_nodes, self.weight_bound)

    @property
    def point_dim(self):
        return self.n_nodes * self.n_nodes

    def describe(self):
        return {"n_nodes": self.n_nodes, "weight_bound": self.weight_bound}

    def _as_matrix(self, point):
        return as_point(point, self.point_dim).reshape(self.n_nodes, self.n_nodes)

    # -- contract ---------------------------------------------------------

    def validate(self, point):
        mat = self._as_matrix(point)
        if not np.all(np.isfinite(mat)):
            raise PointValidationError("Laplacian contains non-finite entries")
        if not np.array_equal(mat, mat.T):
            raise PointValidationError("Laplacian is not symmetric")
        row_sums = mat.sum(axis=1)
        if np.any(np.abs(row_sums) > ROW_SUM_TOL):
            raise PointValidationError(
                f"Laplacian row sums exceed {ROW_SUM_TOL}: {np.abs(row_sums).max()!r}"
            )
        off = mat[self._offdiag]
        if np.any(off > 0.0):
            raise PointValidationError("Laplacian has positive off-diagonal entries")
        if self.weight_bound is not None and np.any(off < -self.weight_bound - ROW_SUM_TOL):
            raise PointValidationError(
                f"edge weight exceeds the bound {self.weight_bound}"
            )

    def dist(self, a, b):
        a = as_point(a, self.point_dim)
        b = as_point(b, self.point_dim)
        self.validate(a)
        self.validate(b)
        return float(np.linalg.norm(a - b))

    def interpolate(self, a, b, t):
        a = as_point(a, self.point_dim)
        b = as_point(b, self.point_dim)
        self.validate(a)
        self.validate(b)
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"interpolation parameter t={t} outside [0, 1]")
        if t == 0.0:
            return a.copy()
        if t == 1.0:
            return b.copy()
        return (1.0 - t) * a + t * b

    def project(self, point):
        """Clip to the Laplacian cone and rebuild the diagonal."""
        mat = self._as_matrix(point).copy()
        off = self._offdiag
        lo = -np.inf if self.weight_bound is None else -self.weight_bound
        mat[off] = np.clip(mat[off], lo, 0.0)
        np.fill_diagonal(mat, 0.0)
        np.fill_diagonal(mat, -mat.sum(axis=1))
        return mat.ravel()

    def transport(self, start, end, point):
        start = as_point(start, self.point_dim)
        end = as_point(end, self.point_dim)
        point = as_point(point, self.point_dim)
        for q in (start, end, point):
            self.validate(q)
        return self.project(point + (end - start))

    def mean(self, points, weights=None):
        points = as_batch(points, self.point_dim)
        if points.shape[0] == 0:
            raise ValueError("cannot average an empty set of points")
        for q in points:
            self.validate(q)
        w = check_weights(weights, points.shape[0])
        return w @ points

    # -- batch paths --------------------------------------------------------

    def dist2_batch(self, A, B):
        A = as_batch(A, self.point_dim)
        B = as_batch(B, self.point_dim)
        d = A - B
        return np.einsum("ij,ij->i", d, d)

    def transport_batch(self, start, end, points):
        points = as_batch(points, self.point_dim)
        delta = np.asarray(end, dtype=np.float64) - np.asarray(start, dtype=np.float64)
        moved = points + delta[None, :]
        l = self.n_nodes
        mats = moved.reshape(-1, l, l)
        lo = -np.inf if self.weight_bound is None else -self.weight_bound
        off = self._offdiag
        mats[:, off] = np.clip(mats[:, off], lo, 0.0)
        idx = np.arange(l)
        mats[:, idx, idx] = 0.0
        mats[:, idx, idx] = -mats.sum(axis=2)
        return mats.reshape(-1, self.point_dim)

    def mean_batch(self, points, weights=None):
        points = as_batch(points, self.point_dim)
        w = check_weights(weights, points.shape[0])
        return w @ points


def laplacian_from_weights(weights_square) -> np.ndarray:
    """Build a flattened Laplacian from a symmetric edge-weight matrix."""
    w = np.asarray(weights_square, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("edge weights must form a square matrix")
    mat = -w.copy()
    np.fill_diagonal(mat, 0.0)
    np.fill_diagonal(mat, -mat.sum(axis=1))
    return mat.ravel()
