"""Gradient boosting with geodesic pseudo-residuals.

Training starts every prediction at the Fréchet mean of the training
outputs.  Each round fits a :class:`~fgboost.tree.GeodesicTree` to the
geodesics running from the current predictions to the observed outputs,
then moves every prediction along its leaf's representative geodesic,
scaled by the learning rate, via the space's transport map.  Because a
chain of geodesic additions is fully determined by its endpoint given the
reference point, predictions are cached as points rather than geodesic
stacks.

A held-out validation subset (10% by default) monitors the empirical risk;
training stops once the best validation risk has not improved by more than
``tol`` for ``n_iter_no_change`` consecutive rounds, and the ensemble is
truncated at the best round.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator

from .errors import PointValidationError
from .spaces import Space, make_space
from .tree import CRITERIA, GeodesicTree
from .validation import check_predictor_matrix, check_output_points


class FGBoostRegressor(BaseEstimator):
    """Boosted geodesic regression from Euclidean predictors to metric outputs.

    Parameters
    ----------
    space : str or Space
        Output space: one of ``"wasserstein"``, ``"laplacian"``, ``"sphere"``,
        ``"euclidean"``, or a constructed :class:`~fgboost.spaces.Space`.
        String names are resolved against the output width at fit time.
    learning_rate : float
        Fraction of each fitted residual geodesic applied per round
        (``0 < learning_rate <= 1``).
    n_estimators : int
        Maximum number of boosting rounds.
    max_depth, min_samples_leaf : int
        Tree growth limits.
    split_criterion : str
        ``"updated-prediction-mse"`` scores candidate splits by the distances
        between observed outputs and transported predictions;
        ``"residual-dg-mse"`` scores them by endpoint-pair distances to the
        child representative (cheaper, used by the Euclidean oracle tests).
    shrinkage_in_split : bool
        Apply the learning rate already inside split scoring.  Off by
        default: trees are scored unshrunk, as in classical boosting.
    validation_fraction : float
        Share of the training set held out for early stopping; ``0``
        disables early stopping.
    n_iter_no_change : int
        Patience, in rounds, on the validation risk.
    tol : float
        Minimum decrease of the validation risk that counts as improvement.
    random_state : int
        Seed for the validation split.
    space_options : dict, optional
        Extra keyword arguments for the space factory (e.g.
        ``{"positive_orthant": True}``).

    Attributes
    ----------
    space_ : Space
        Resolved output space.
    baseline_ : ndarray
        Fréchet mean of the training outputs (the constant initial model).
    trees_ : list of GeodesicTree
        Fitted trees, truncated at the best validation round.
    train_risk_trace_, val_risk_trace_ : ndarray
        Empirical risk after each round, starting with the constant model
        at index 0.  ``val_risk_trace_`` is ``None`` without validation.
    best_iteration_ : int
        Number of trees kept.
    """

    def __init__(
        self,
        space="euclidean",
        *,
        learning_rate=0.05,
        n_estimators=100,
        max_depth=3,
        min_samples_leaf=10,
        split_criterion="updated-prediction-mse",
        shrinkage_in_split=False,
        validation_fraction=0.1,
        n_iter_no_change=10,
        tol=1e-12,
        random_state=0,
        space_options=None,
    ):
        self.space = space
        self.learning_rate = learning_rate
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.split_criterion = split_criterion
        self.shrinkage_in_split = shrinkage_in_split
        self.validation_fraction = validation_fraction
        self.n_iter_no_change = n_iter_no_change
        self.tol = tol
        self.random_state = random_state
        self.space_options = space_options

    # -- parameter resolution ------------------------------------------------

    def _check_params(self):
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in [0, 1)")
        if self.n_iter_no_change < 1:
            raise ValueError("n_iter_no_change must be >= 1")
        if self.split_criterion not in CRITERIA:
            raise ValueError(f"split_criterion must be one of {CRITERIA}")

    def _resolve_space(self, point_dim):
        if isinstance(self.space, Space):
            if self.space.point_dim != point_dim:
                raise ValueError(
                    f"space expects points of length {self.space.point_dim}, "
                    f"outputs have {point_dim}"
                )
            return self.space
        return make_space(self.space, point_dim, **(self.space_options or {}))

    # -- fitting ---------------------------------------------------------------

    def fit(self, X, Y):
        self._check_params()
        X = check_predictor_matrix(X)
        n = X.shape[0]
        if n < 1:
            raise ValueError("need at least one training sample")
        Y = np.asarray(Y, dtype=np.float64)
        if Y.ndim != 2 or Y.shape[0] != n:
            raise ValueError(
                f"Y must be an (n_samples, point_dim) array matching X, got {Y.shape}"
            )
        space = self._resolve_space(Y.shape[1])
        check_output_points(space, Y)

        self.space_ = space
        self.n_features_in_ = X.shape[1]
        self._train_X = X

        rng = np.random.default_rng(self.random_state)
        n_val = int(n * self.validation_fraction)
        if n_val >= 1 and n - n_val >= 1:
            perm = rng.permutation(n)
            val_idx, train_idx = perm[:n_val], perm[n_val:]
        else:
            val_idx = np.empty(0, dtype=np.int64)
            train_idx = np.arange(n)
        X_tr, Y_tr = X[train_idx], Y[train_idx]
        X_val, Y_val = X[val_idx], Y[val_idx]
        has_val = val_idx.size > 0

        self.baseline_ = space.mean_batch(Y_tr)
        self.trees_ = []

        if X_tr.shape[0] < 2 * self.min_samples_leaf:
            warnings.warn(
                f"only {X_tr.shape[0]} training samples cannot honor "
                f"min_samples_leaf={self.min_samples_leaf} on both sides of a "
                "split; fitting the constant baseline model",
                UserWarning,
            )
            self.train_risk_trace_ = np.array(
                [self._risk(Y_tr, np.tile(self.baseline_, (X_tr.shape[0], 1)))]
            )
            self.val_risk_trace_ = (
                np.array([self._risk(Y_val, np.tile(self.baseline_, (n_val, 1)))])
                if has_val
                else None
            )
            self.best_iteration_ = 0
            self.n_estimators_ = 0
            return self

        preds_tr = np.tile(self.baseline_, (X_tr.shape[0], 1))
        preds_val = np.tile(self.baseline_, (X_val.shape[0], 1))
        train_trace = [self._risk(Y_tr, preds_tr)]
        val_trace = [self._risk(Y_val, preds_val)] if has_val else None

        shrink = self.learning_rate if self.shrinkage_in_split else 1.0
        best_val = val_trace[0] if has_val else np.inf
        best_rounds = 0
        rounds_since_improvement = 0
        trees = []

        for _ in range(self.n_estimators):
            tree = GeodesicTree(
                max_depth=self.max_depth,
                min_samples_leaf=self.min_samples_leaf,
                criterion=self.split_criterion,
                shrink=shrink,
            ).fit(X_tr, preds_tr, Y_tr, space)
            trees.append(tree)
            self._apply_tree(tree, X_tr, preds_tr)
            train_trace.append(self._risk(Y_tr, preds_tr))
            if has_val:
                self._apply_tree(tree, X_val, preds_val)
                val_risk = self._risk(Y_val, preds_val)
                val_trace.append(val_risk)
                if val_risk < best_val - self.tol:
                    best_val = val_risk
                    best_rounds = len(trees)
                    rounds_since_improvement = 0
                else:
                    rounds_since_improvement += 1
                    if rounds_since_improvement >= self.n_iter_no_change:
                        break

        if has_val:
            self.trees_ = trees[:best_rounds]
        else:
            self.trees_ = trees
        self.best_iteration_ = len(self.trees_)
        self.n_estimators_ = len(self.trees_)
        self.train_risk_trace_ = np.asarray(train_trace)
        self.val_risk_trace_ = None if val_trace is None else np.asarray(val_trace)
        return self

    def _risk(self, Y, preds):
        if Y.shape[0] == 0:
            return np.nan
        return float(np.mean(self.space_.dist2_batch(Y, preds)))

    def _apply_tree(self, tree, X, preds):
        """Move predictions along the (scaled) leaf geodesics, in place."""
        if X.shape[0] == 0:
            return
        leaf_ids = tree.apply(X)
        for leaf in np.unique(leaf_ids):
            rows = leaf_ids == leaf
            start = tree.leaf_start_[leaf]
            end = tree.leaf_end_[leaf]
            scaled_end = self.space_.interpolate(start, end, self.learning_rate)
            preds[rows] = self.space_.transport_batch(start, scaled_end, preds[rows])

    # -- inference ---------------------------------------------------------------

    def _raw_predict(self, X):
        preds = np.tile(self.baseline_, (X.shape[0], 1))
        for tree in self.trees_:
            self._apply_tree(tree, X, preds)
        return preds

    def predict(self, X):
        """Predicted output points, one encoded row per input row.

        Space-specific output projection (the positive-orthant clamp of the
        compositional sphere) is applied here and nowhere else.
        """
        if not hasattr(self, "trees_"):
            raise RuntimeError("this model is not fitted")
        X = check_predictor_matrix(X, expected_columns=self.n_features_in_)
        return self.space_.finalize_batch(self._raw_predict(X))

    def empirical_risk(self, X, Y):
        """Mean squared output-space distance between ``Y`` and predictions."""
        Y = np.asarray(Y, dtype=np.float64)
        preds = self.predict(X)
        if Y.shape != preds.shape:
            raise ValueError(f"Y has shape {Y.shape}, expected {preds.shape}")
        if Y.shape[0] == 0:
            raise ValueError("cannot evaluate risk on an empty dataset")
        return float(np.mean(self.space_.dist2_batch(Y, preds)))
