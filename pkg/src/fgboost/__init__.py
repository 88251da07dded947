"""Gradient boosting for outputs in geodesic metric spaces.

Regression from Euclidean predictors to outputs such as one-dimensional
distributions (Wasserstein geometry), weighted networks (graph Laplacians
under the Frobenius metric), compositions (the positive orthant of the unit
sphere), and plain vectors.  Residuals are replaced by geodesics from the
current prediction to the observation; trees fit those geodesics and the
ensemble replays them through geodesic transport.
"""

from .boosting import FGBoostRegressor
from .errors import (
    ConvergenceError,
    CsvFormatError,
    FGBoostError,
    GeometryError,
    GridMismatchError,
    ModelFormatError,
    PointValidationError,
    SpaceMismatchError,
)
from .explain import MetricShapExplainer, ShapSummary
from .geodesic import (
    Geodesic,
    frechet_mean,
    geo_add,
    geo_dist,
    geo_reverse,
    geo_scale,
    geodesic_mean,
)
from .io import load_model, model_from_dict, model_to_dict, save_model
from .simulate import ScenarioConfig, SimulatedData, amspe, generate, mspe
from .spaces import (
    EuclideanSpace,
    LaplacianSpace,
    Space,
    SphereSpace,
    WassersteinSpace,
    make_space,
    quantile_from_sample,
    simplex_to_sphere,
)
from .tree import GeodesicTree, SplitChoice, find_best_split

__version__ = "0.1.0"

__all__ = [
    "FGBoostRegressor",
    "Geodesic",
    "GeodesicTree",
    "MetricShapExplainer",
    "ShapSummary",
    "ScenarioConfig",
    "SimulatedData",
    "Space",
    "EuclideanSpace",
    "LaplacianSpace",
    "SphereSpace",
    "WassersteinSpace",
    "SplitChoice",
    "geo_add",
    "geo_dist",
    "geo_reverse",
    "geo_scale",
    "geodesic_mean",
    "frechet_mean",
    "find_best_split",
    "generate",
    "mspe",
    "amspe",
    "make_space",
    "quantile_from_sample",
    "simplex_to_sphere",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
    "FGBoostError",
    "PointValidationError",
    "SpaceMismatchError",
    "GridMismatchError",
    "GeometryError",
    "ConvergenceError",
    "ModelFormatError",
    "CsvFormatError",
    "__version__",
]
