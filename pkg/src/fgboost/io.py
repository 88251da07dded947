"""File formats: CSV point encodings and versioned model JSON.

CSV conventions: comma separator, ``.`` decimal point, LF line endings,
UTF-8, floats written with ``repr`` so that write -> read -> write is
byte-identical.  Output points use one row per point in the flat space
encoding (quantile grid of length m; row-major ``l**2`` Laplacian entries;
``d`` coordinates for sphere/Euclidean points).

Models are stored as a single JSON document carrying a ``format_version``;
loading a model and predicting reproduces in-memory predictions bit for bit.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .boosting import FGBoostRegressor
from .errors import CsvFormatError, ModelFormatError
from .spaces import space_from_config
from .tree import GeodesicTree

MODEL_FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def write_matrix(path, matrix, header=None):
    """Write a 2-D float array as CSV with round-trip-exact float text."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {matrix.shape}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header is not None:
            fh.write(",".join(str(h) for h in header) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_matrix(path, has_header=False):
    """Read a CSV of floats; malformed content raises with the line number."""
    rows = []
    header = None
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if lineno == 1 and has_header:
                header = line.split(",") if line else []
                continue
            if line == "":
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise CsvFormatError(
                    f"row has {len(cells)} columns, expected {width}", line=lineno
                )
            try:
                values = [float(c) for c in cells]
            except ValueError:
                raise CsvFormatError("row contains a non-numeric cell", line=lineno)
            if not all(np.isfinite(values)):
                raise CsvFormatError("row contains a non-finite value", line=lineno)
            rows.append(values)
    if not rows:
        return np.empty((0, 0)), header
    return np.asarray(rows, dtype=np.float64), header


# ---------------------------------------------------------------------------
# model JSON
# ---------------------------------------------------------------------------


def model_to_dict(model: FGBoostRegressor) -> dict:
    if not hasattr(model, "trees_"):
        raise ValueError("cannot serialize an unfitted model")
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "space": {"name": model.space_.name, **model.space_.describe()},
        "params": {
            "learning_rate": model.learning_rate,
            "n_estimators": model.n_estimators,
            "max_depth": model.max_depth,
            "min_samples_leaf": model.min_samples_leaf,
            "split_criterion": model.split_criterion,
            "shrinkage_in_split": model.shrinkage_in_split,
            "validation_fraction": model.validation_fraction,
            "n_iter_no_change": model.n_iter_no_change,
            "tol": model.tol,
            "random_state": model.random_state,
        },
        "n_features": model.n_features_in_,
        "baseline": model.baseline_.tolist(),
        "trees": [tree.to_dict() for tree in model.trees_],
        "best_iteration": model.best_iteration_,
        "train_risk_trace": model.train_risk_trace_.tolist(),
        "val_risk_trace": (
            None if model.val_risk_trace_ is None else model.val_risk_trace_.tolist()
        ),
    }


def model_from_dict(data: dict) -> FGBoostRegressor:
    version = data.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format_version {version!r}, "
            f"this build reads version {MODEL_FORMAT_VERSION}"
        )
    space = space_from_config(data["space"])
    model = FGBoostRegressor(space=space, **data["params"])
    model.space_ = space
    model.n_features_in_ = int(data["n_features"])
    model.baseline_ = np.asarray(data["baseline"], dtype=np.float64)
    model.trees_ = [GeodesicTree.from_dict(t, space) for t in data["trees"]]
    model.best_iteration_ = int(data["best_iteration"])
    model.n_estimators_ = len(model.trees_)
    model.train_risk_trace_ = np.asarray(data["train_risk_trace"], dtype=np.float64)
    trace = data.get("val_risk_trace")
    model.val_risk_trace_ = None if trace is None else np.asarray(trace, dtype=np.float64)
    return model


def save_model(model, path):
    payload = model_to_dict(model)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def load_model(path) -> FGBoostRegressor:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(data)
