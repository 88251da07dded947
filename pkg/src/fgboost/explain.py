"""Metric-valued Shapley attributions for fitted models.

Classical Shapley values weight, over feature subsets, the change a feature
causes in the prediction.  With outputs in a metric space the signed change
is replaced by the output-space distance between the two restricted
predictions, so attributions are magnitudes: non-negative, and without the
additive efficiency property of the signed form.

Restricted predictions are realized without retraining by interventional
marginalization over a background sample: features inside the subset come
from the explained row, the rest from each background row, and the resulting
predictions are aggregated with a Fréchet mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import check_predictor_matrix

EXACT_MODE_MAX_FEATURES = 15


@dataclass
class ShapSummary:
    """Per-row attributions plus the global importance ranking."""

    values: np.ndarray  # (n_rows, n_features), non-negative
    mean_phi: np.ndarray  # (n_features,)
    ranking: list  # feature indices sorted by descending mean attribution

    def ranking_records(self):
        return [
            {"feature": int(j), "mean_phi": float(self.mean_phi[j])}
            for j in self.ranking
        ]


class MetricShapExplainer:
    """Shapley attribution engine for a fitted :class:`FGBoostRegressor`.

    Parameters
    ----------
    model : fitted FGBoostRegressor
    background : array-like, optional
        Predictor rows used for marginalization.  Defaults to a uniform
        subsample (at most ``max_background`` rows, drawn with
        ``random_state``) of the model's training predictors; loaded models
        do not carry training data, so an explicit background is then
        required.
    max_background : int
    random_state : int
        Seed for the background subsample and for permutation sampling.
    """

    def __init__(self, model, background=None, max_background=100, random_state=0):
        if not hasattr(model, "trees_"):
            raise ValueError("model must be fitted before it can be explained")
        self.model = model
        self.space = model.space_
        self.n_features = model.n_features_in_
        self.random_state = random_state
        if background is None:
            train = getattr(model, "_train_X", None)
            if train is None:
                raise ValueError(
                    "model carries no training predictors; pass background= explicitly"
                )
            background = train
        background = check_predictor_matrix(background, self.n_features)
        if background.shape[0] == 0:
            raise ValueError("background must contain at least one row")
        if background.shape[0] > max_background:
            rng = np.random.default_rng(random_state)
            pick = rng.choice(background.shape[0], size=max_background, replace=False)
            background = background[np.sort(pick)]
        self.background = background

    # -- restricted model ---------------------------------------------------

    def restricted_predict(self, x, subset):
        """Marginalized prediction with only ``subset`` features pinned to ``x``."""
        mask = 0
        for j in subset:
            if not 0 <= j < self.n_features:
                raise ValueError(f"feature index {j} out of range")
            mask |= 1 << j
        x = np.asarray(x, dtype=np.float64).ravel()
        return self._predict_mask(x, mask, {})

    def _predict_mask(self, x, mask, memo):
        cached = memo.get(mask)
        if cached is not None:
            return cached
        hybrids = self.background.copy()
        if mask:
            cols = [j for j in range(self.n_features) if mask >> j & 1]
            hybrids[:, cols] = x[cols]
        preds = self.model.predict(hybrids)
        out = self.space.mean_batch(preds)
        memo[mask] = out
        return out

    # -- attributions ---------------------------------------------------------

    def shap_values(self, X, mode="exact", n_permutations=2048):
        """Attribution matrix, one non-negative row of length p per input row.

        ``mode="exact"`` enumerates all feature subsets with the Shapley
        multinomial weights and requires at most 15 features;
        ``mode="sampled"`` averages prefix contributions over seeded uniform
        random permutations instead.
        """
        X = check_predictor_matrix(X, self.n_features)
        if mode not in ("exact", "sampled"):
            raise ValueError("mode must be 'exact' or 'sampled'")
        if mode == "exact" and self.n_features > EXACT_MODE_MAX_FEATURES:
            raise ValueError(
                f"exact mode enumerates 2^p subsets and is limited to "
                f"p <= {EXACT_MODE_MAX_FEATURES}; use mode='sampled'"
            )
        rows = [self._explain_row(x, mode, n_permutations) for x in X]
        return np.asarray(rows)

    def _explain_row(self, x, mode, n_permutations):
        p = self.n_features
        memo = {}
        phi = np.zeros(p)
        if mode == "exact":
            # weight of a subset of size k among the p! orderings
            weights = [
                math.factorial(k) * math.factorial(p - k - 1) / math.factorial(p)
                for k in range(p)
            ]
            for mask in range(1 << p):
                size = mask.bit_count()
                base = self._predict_mask(x, mask, memo)
                for j in range(p):
                    if mask >> j & 1:
                        continue
                    with_j = self._predict_mask(x, mask | (1 << j), memo)
                    phi[j] += weights[size] * self.space.dist(with_j, base)
            return phi
        rng = np.random.default_rng(self.random_state)
        for _ in range(n_permutations):
            order = rng.permutation(p)
            mask = 0
            prev = self._predict_mask(x, 0, memo)
            for j in order:
                mask |= 1 << int(j)
                cur = self._predict_mask(x, mask, memo)
                phi[j] += self.space.dist(cur, prev)
                prev = cur
        return phi / n_permutations

    def summary(self, X, mode="exact", n_permutations=2048) -> ShapSummary:
        """Attributions for every row plus the mean-importance ranking."""
        values = self.shap_values(X, mode=mode, n_permutations=n_permutations)
        mean_phi = values.mean(axis=0) if values.size else np.zeros(self.n_features)
        ranking = list(np.argsort(-mean_phi, kind="stable"))
        return ShapSummary(values=values, mean_phi=mean_phi, ranking=ranking)
