"""CART-style regression trees whose leaves hold representative geodesics.

A tree is fit to pseudo-residual geodesics: for sample ``i`` the residual
runs from the current prediction (``starts[i]``) to the observed output
(``ends[i]``).  Each leaf stores the Fréchet mean of the residuals routed to
it, which under the endpoint-pair metric decouples into the mean of the
starts and the mean of the ends.

Split search is exhaustive: every feature, with thresholds at midpoints
between consecutive distinct sorted values.  Candidate quality is one of

* ``updated-prediction-mse``: the summed squared distance between each
  member's observed output and its current prediction transported along the
  child's representative geodesic (scaled by the shrinkage factor when
  shrinkage participates in split scoring);
* ``residual-dg-mse``: the summed squared endpoint-pair distance between
  each member's residual and the child representative.

The best candidate maximizes the loss reduction against the parent's own
criterion value; ties break to the lowest feature index, then the lowest
threshold.  Splits that reduce the loss by at most ``REDUCTION_EPS`` are
rejected, so all-identical nodes become leaves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _scan
from .errors import ConvergenceError
from .geodesic import Geodesic
from .spaces import EuclideanSpace, LaplacianSpace, SphereSpace, WassersteinSpace

REDUCTION_EPS = 1e-12

CRITERIA = ("updated-prediction-mse", "residual-dg-mse")


@dataclass(frozen=True)
class SplitChoice:
    feature: int
    threshold: float
    reduction: float


class _WassersteinPool:
    """Start-grid values of all samples, sorted once and subset per node."""

    def __init__(self, starts, ends):
        n, m = starts.shape
        flat = starts.ravel()
        order = np.argsort(flat, kind="stable")
        self.x = flat[order]
        self.e = ends.ravel()[order]
        self.sid = (order // m).astype(np.int64)
        self.n = n

    def subset(self, member_mask):
        keep = member_mask[self.sid]
        return self.x[keep], self.e[keep], self.sid[keep]


def _scan_feature(space, S, E, bvals, criterion, shrink, pool_slice, ranks):
    """Candidate totals for one feature; rows of S/E are in feature order."""
    n = S.shape[0]
    barr = np.asarray(bvals, dtype=np.int64)
    if isinstance(space, EuclideanSpace):
        if criterion == "residual-dg-mse":
            return _scan.flat_scan_pairs(S, E, barr)
        return _scan.flat_scan_updated(S, E, barr, shrink)
    if isinstance(space, WassersteinSpace):
        m = space.grid_size
        if criterion == "residual-dg-mse":
            return _scan.flat_scan_pairs(S, E, barr, dist_scale=1.0 / m)
        if m < 2 or pool_slice is None:
            return _scan.reference_scan(space, S, E, barr, criterion, shrink)
        xp, ep, sid = pool_slice
        pos = ranks[sid]
        lo, hi = (-np.inf, np.inf) if space.support is None else space.support
        out = np.empty(barr.size)
        _scan.wasserstein_updated_kernel(
            xp, ep, pos,
            np.cumsum(S, axis=0), np.cumsum(E, axis=0),
            barr, shrink, lo, hi, out,
        )
        return out
    if isinstance(space, LaplacianSpace):
        if criterion == "residual-dg-mse":
            return _scan.flat_scan_pairs(S, E, barr)
        wlo = -np.inf if space.weight_bound is None else -space.weight_bound
        out = np.empty(barr.size)
        _scan.laplacian_updated_kernel(
            S, E, np.cumsum(S, axis=0), np.cumsum(E, axis=0),
            barr, shrink, space.n_nodes, wlo, out,
        )
        return out
    if isinstance(space, SphereSpace):
        out = np.empty(barr.size)
        fail = _scan.sphere_scan_kernel(
            S, E, np.cumsum(S, axis=0), np.cumsum(E, axis=0),
            barr, shrink, criterion == "residual-dg-mse",
            space.settings.mean_tol, space.settings.mean_max_iter,
            space.settings.degenerate_tol, out,
        )
        if fail:
            raise ConvergenceError(
                "Karcher mean failed to converge during split search",
                space.settings.mean_max_iter,
            )
        return out
    return _scan.reference_scan(space, S, E, barr, criterion, shrink)


def find_best_split(
    space,
    X,
    starts,
    ends,
    *,
    min_samples_leaf=10,
    criterion="updated-prediction-mse",
    shrink=1.0,
    parent_criterion=None,
    pool=None,
    member_mask=None,
    use_fast_scan=True,
):
    """Best split of one node, or ``None`` when no candidate improves.

    ``X``, ``starts``, ``ends`` hold only the node's samples.  A candidate is
    legal when both children keep at least ``min_samples_leaf`` samples and
    the threshold separates distinct feature values; it is accepted only when
    its loss reduction exceeds ``REDUCTION_EPS``.
    """
    n, p = X.shape
    if n < 2 * min_samples_leaf:
        return None
    if parent_criterion is None:
        parent_criterion = _scan.node_criterion(space, starts, ends, criterion, shrink)
    if pool is None and member_mask is not None:
        raise ValueError("member_mask requires a pool")

    pool_slice = None
    node_rows = None
    if use_fast_scan and pool is not None and isinstance(space, WassersteinSpace):
        pool_slice = pool.subset(member_mask)
        node_rows = np.nonzero(member_mask)[0]

    best = None
    for f in range(p):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        boundaries = np.nonzero(xs[1:] > xs[:-1])[0] + 1
        boundaries = boundaries[
            (boundaries >= min_samples_leaf) & (boundaries <= n - min_samples_leaf)
        ]
        if boundaries.size == 0:
            continue
        S = starts[order]
        E = ends[order]
        if not use_fast_scan:
            totals = _scan.reference_scan(space, S, E, boundaries, criterion, shrink)
        else:
            ranks = None
            if pool_slice is not None:
                ranks = np.empty(pool.n, dtype=np.int64)
                ranks[node_rows[order]] = np.arange(n)
            totals = _scan_feature(
                space, S, E, boundaries, criterion, shrink, pool_slice, ranks
            )
        for b, total in zip(boundaries, totals):
            reduction = parent_criterion - total
            if reduction <= REDUCTION_EPS:
                continue
            threshold = 0.5 * (xs[b - 1] + xs[b])
            if threshold >= xs[b]:
                threshold = xs[b - 1]
            if best is None or reduction > best.reduction:
                best = SplitChoice(f, float(threshold), float(reduction))
    return best


class GeodesicTree:
    """Binary regression tree with geodesic-valued leaves, in heap layout.

    Node ``i`` has children ``2 i + 1`` and ``2 i + 2``; a sample goes left
    iff ``x[feature] <= threshold``.  After :meth:`fit`, arrays
    ``node_kind_`` (0 absent, 1 internal, 2 leaf), ``feature_``,
    ``threshold_``, ``leaf_start_``, ``leaf_end_`` and ``count_`` describe
    the tree.  Fitted trees are immutable and safe to share across threads.
    """

    def __init__(
        self,
        max_depth=3,
        min_samples_leaf=10,
        criterion="updated-prediction-mse",
        shrink=1.0,
        use_fast_scan=True,
    ):
        if max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if not 0.0 < shrink <= 1.0:
            raise ValueError("shrink must be in (0, 1]")
        self.max_depth = int(max_depth)
        self.min_samples_leaf = int(min_samples_leaf)
        self.criterion = criterion
        self.shrink = float(shrink)
        self.use_fast_scan = bool(use_fast_scan)

    def fit(self, X, starts, ends, space):
        X = np.asarray(X, dtype=np.float64)
        starts = np.asarray(starts, dtype=np.float64)
        ends = np.asarray(ends, dtype=np.float64)
        n, p = X.shape
        if n == 0:
            raise ValueError("cannot fit a tree on empty data")
        if starts.shape != (n, space.point_dim) or ends.shape != (n, space.point_dim):
            raise ValueError("starts/ends must be (n_samples, point_dim) arrays")

        self.space = space
        self.n_features_ = p
        size = 2 ** (self.max_depth + 1) - 1
        self.node_kind_ = np.zeros(size, dtype=np.int8)
        self.feature_ = np.full(size, -1, dtype=np.int32)
        self.threshold_ = np.full(size, np.nan)
        self.leaf_start_ = np.full((size, space.point_dim), np.nan)
        self.leaf_end_ = np.full((size, space.point_dim), np.nan)
        self.count_ = np.zeros(size, dtype=np.int64)

        pool = None
        if (
            self.use_fast_scan
            and isinstance(space, WassersteinSpace)
            and self.criterion == "updated-prediction-mse"
            and space.grid_size >= 2
        ):
            pool = _WassersteinPool(starts, ends)

        stack = [(0, np.arange(n), 0)]
        while stack:
            node, rows, depth = stack.pop()
            sub_X = X[rows]
            sub_S = starts[rows]
            sub_E = ends[rows]
            self.count_[node] = rows.size
            choice = None
            if depth < self.max_depth and rows.size >= 2 * self.min_samples_leaf:
                member_mask = None
                if pool is not None:
                    member_mask = np.zeros(n, dtype=bool)
                    member_mask[rows] = True
                choice = find_best_split(
                    space,
                    sub_X,
                    sub_S,
                    sub_E,
                    min_samples_leaf=self.min_samples_leaf,
                    criterion=self.criterion,
                    shrink=self.shrink,
                    pool=pool,
                    member_mask=member_mask,
                    use_fast_scan=self.use_fast_scan,
                )
            if choice is None:
                self.node_kind_[node] = 2
                self.leaf_start_[node] = space.mean_batch(sub_S)
                self.leaf_end_[node] = space.mean_batch(sub_E)
            else:
                self.node_kind_[node] = 1
                self.feature_[node] = choice.feature
                self.threshold_[node] = choice.threshold
                go_left = sub_X[:, choice.feature] <= choice.threshold
                stack.append((2 * node + 1, rows[go_left], depth + 1))
                stack.append((2 * node + 2, rows[~go_left], depth + 1))
        return self

    # -- prediction ---------------------------------------------------------

    def apply(self, X):
        """Leaf (heap) index for every row of ``X``."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise ValueError(
                f"X must have {self.n_features_} columns, got shape {X.shape}"
            )
        ids = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            internal = self.node_kind_[ids] == 1
            if not internal.any():
                return ids
            rows = np.nonzero(internal)[0]
            cur = ids[rows]
            go_left = X[rows, self.feature_[cur]] <= self.threshold_[cur]
            ids[rows] = 2 * cur + 1 + (~go_left)

    def predict_geodesic(self, x) -> Geodesic:
        """Representative geodesic of the leaf that ``x`` routes to."""
        leaf = int(self.apply(np.atleast_2d(np.asarray(x, dtype=np.float64)))[0])
        return Geodesic(self.leaf_start_[leaf], self.leaf_end_[leaf], self.space)

    @property
    def n_leaves(self):
        return int(np.sum(self.node_kind_ == 2))

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        leaves = np.nonzero(self.node_kind_ == 2)[0]
        return {
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "criterion": self.criterion,
            "shrink": self.shrink,
            "n_features": self.n_features_,
            "node_kind": self.node_kind_.tolist(),
            "feature": self.feature_.tolist(),
            "threshold": [
                None if np.isnan(t) else float(t) for t in self.threshold_
            ],
            "count": self.count_.tolist(),
            "leaf_index": leaves.tolist(),
            "leaf_start": self.leaf_start_[leaves].tolist(),
            "leaf_end": self.leaf_end_[leaves].tolist(),
        }

    @classmethod
    def from_dict(cls, data, space):
        tree = cls(
            max_depth=data["max_depth"],
            min_samples_leaf=data["min_samples_leaf"],
            criterion=data["criterion"],
            shrink=data["shrink"],
        )
        tree.space = space
        tree.n_features_ = int(data["n_features"])
        size = len(data["node_kind"])
        tree.node_kind_ = np.asarray(data["node_kind"], dtype=np.int8)
        tree.feature_ = np.asarray(data["feature"], dtype=np.int32)
        tree.threshold_ = np.asarray(
            [np.nan if t is None else t for t in data["threshold"]], dtype=np.float64
        )
        tree.count_ = np.asarray(data["count"], dtype=np.int64)
        tree.leaf_start_ = np.full((size, space.point_dim), np.nan)
        tree.leaf_end_ = np.full((size, space.point_dim), np.nan)
        leaves = np.asarray(data["leaf_index"], dtype=np.int64)
        tree.leaf_start_[leaves] = np.asarray(data["leaf_start"], dtype=np.float64)
        tree.leaf_end_[leaves] = np.asarray(data["leaf_end"], dtype=np.float64)
        return tree
