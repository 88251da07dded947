"""Cross-validated hyperparameter grid search."""

from __future__ import annotations

from itertools import product

import numpy as np

from .boosting import FGBoostRegressor

DEFAULT_GRID = {
    "learning_rate": (0.01, 0.03, 0.05, 0.1),
    "n_estimators": (50, 70, 90, 100),
    "max_depth": (2, 3, 4, 5),
}


def grid_search_cv(
    X,
    Y,
    space,
    *,
    grid=None,
    n_folds=5,
    random_state=0,
    base_params=None,
):
    """Pick (learning rate, iterations, depth) by k-fold cross-validation.

    Every grid combination is fitted on each fold complement and scored by
    the empirical risk on the held-out fold.  The combination with the
    lowest mean held-out risk wins; exact ties go to the smaller model
    (fewer iterations, then shallower trees).

    Returns ``(best_params, fold_rows)`` where ``fold_rows`` is a list of
    per-(combination, fold) records from which the selection can be
    recomputed.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    n = X.shape[0]
    if n < n_folds:
        raise ValueError(f"need at least {n_folds} samples for {n_folds}-fold CV")
    grid = dict(DEFAULT_GRID, **(grid or {}))
    base_params = dict(base_params or {})

    rng = np.random.default_rng(random_state)
    fold_of = np.zeros(n, dtype=np.int64)
    perm = rng.permutation(n)
    for fold, chunk in enumerate(np.array_split(perm, n_folds)):
        fold_of[chunk] = fold

    rows = []
    summaries = []
    combos = list(
        product(grid["learning_rate"], grid["n_estimators"], grid["max_depth"])
    )
    for lr, n_estimators, depth in combos:
        risks = []
        for fold in range(n_folds):
            hold = fold_of == fold
            model = FGBoostRegressor(
                space=space,
                learning_rate=lr,
                n_estimators=n_estimators,
                max_depth=depth,
                **base_params,
            ).fit(X[~hold], Y[~hold])
            risk = model.empirical_risk(X[hold], Y[hold])
            risks.append(risk)
            rows.append(
                {
                    "learning_rate": lr,
                    "n_estimators": n_estimators,
                    "max_depth": depth,
                    "fold": fold,
                    "risk": risk,
                }
            )
        summaries.append(
            {
                "learning_rate": lr,
                "n_estimators": n_estimators,
                "max_depth": depth,
                "mean_risk": float(np.mean(risks)),
            }
        )
    best = min(
        summaries, key=lambda s: (s["mean_risk"], s["n_estimators"], s["max_depth"])
    )
    best_params = {
        "learning_rate": best["learning_rate"],
        "n_estimators": best["n_estimators"],
        "max_depth": best["max_depth"],
    }
    return best_params, rows
