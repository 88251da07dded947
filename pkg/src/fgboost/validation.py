"""Input validation helpers shared by the estimator, explainer and CLI."""

from __future__ import annotations

import numpy as np

from .errors import PointValidationError


def check_predictor_matrix(X, expected_columns=None):
    """Coerce ``X`` to a finite 2-D float64 matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"predictors must form a 2-D matrix, got shape {X.shape}")
    if X.size and not np.all(np.isfinite(X)):
        bad = int(np.nonzero(~np.isfinite(X).all(axis=1))[0][0])
        raise ValueError(f"predictor row {bad} contains non-finite values")
    if expected_columns is not None and X.shape[1] != expected_columns:
        raise ValueError(
            f"predictors have {X.shape[1]} columns, the model expects {expected_columns}"
        )
    return X


def check_output_points(space, Y):
    """Validate every output row against the space, reporting the row index."""
    for i, row in enumerate(Y):
        try:
            space.validate(row)
        except PointValidationError as exc:
            raise PointValidationError(f"output row {i}: {exc}") from None
    return Y
