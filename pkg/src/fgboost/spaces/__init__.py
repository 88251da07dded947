"""Metric-space backends and the factory that resolves them by name."""

from __future__ import annotations

import math

from .base import Space
from .euclidean import EuclideanSpace
from .laplacian import LaplacianSpace, laplacian_from_weights
from .sphere import SphereSpace, simplex_to_sphere
from .wasserstein import (
    WassersteinSpace,
    midpoint_grid,
    pav_nondecreasing,
    pwl_evaluate,
    quantile_from_sample,
)

SPACE_NAMES = ("wasserstein", "laplacian", "sphere", "euclidean")


def make_space(name: str, point_dim: int, **options) -> Space:
    """Build a backend by name for points encoded with ``point_dim`` entries.

    Options are forwarded to the backend constructor (``support`` for
    ``wasserstein``, ``weight_bound`` for ``laplacian``,
    ``positive_orthant`` for ``sphere``).
    """
    name = name.lower()
    if name == "wasserstein":
        return WassersteinSpace(grid_size=point_dim, **options)
    if name == "laplacian":
        n_nodes = math.isqrt(point_dim)
        if n_nodes * n_nodes != point_dim:
            raise ValueError(
                f"laplacian rows must have a square number of entries, got {point_dim}"
            )
        return LaplacianSpace(n_nodes=n_nodes, **options)
    if name == "sphere":
        return SphereSpace(dim=point_dim, **options)
    if name == "euclidean":
        return EuclideanSpace(dim=point_dim, **options)
    raise ValueError(f"unknown space {name!r}; expected one of {SPACE_NAMES}")


def space_from_config(config: dict) -> Space:
    """Rebuild a backend from ``{"name": ..., **describe()}`` metadata."""
    cfg = dict(config)
    name = cfg.pop("name")
    if name == "wasserstein":
        return WassersteinSpace(grid_size=cfg["grid_size"], support=cfg.get("support"))
    if name == "laplacian":
        return LaplacianSpace(n_nodes=cfg["n_nodes"], weight_bound=cfg.get("weight_bound"))
    if name == "sphere":
        return SphereSpace(dim=cfg["dim"], positive_orthant=cfg.get("positive_orthant", False))
    if name == "euclidean":
        return EuclideanSpace(dim=cfg["dim"])
    raise ValueError(f"unknown space {name!r}")


__all__ = [
    "Space",
    "EuclideanSpace",
    "LaplacianSpace",
    "SphereSpace",
    "WassersteinSpace",
    "SPACE_NAMES",
    "make_space",
    "space_from_config",
    "laplacian_from_weights",
    "simplex_to_sphere",
    "midpoint_grid",
    "pav_nondecreasing",
    "pwl_evaluate",
    "quantile_from_sample",
]
