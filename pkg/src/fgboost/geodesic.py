"""Space-agnostic geodesic algebra.

In a unique geodesic space a geodesic is identified by its ordered endpoint
pair, so a :class:`Geodesic` stores exactly that (plus the backend it lives
in); intermediate points are always recomputed through the backend's
``interpolate``.  On top of this representation the module provides the
vector-like operations that the boosting engine builds on:

* ``geo_scale(g, nu)`` -- restrict ``g`` to its initial ``nu`` fraction.
* ``geo_reverse(g)`` -- swap the endpoints.
* ``geo_add(g1, g2)`` -- chain ``g2`` onto the end of ``g1`` by transporting
  ``g2``'s displacement to ``g1.end``.
* ``geo_dist(g1, g2)`` -- root-sum-of-squares of the endpoint distances,
  a metric on the space of geodesics.
* ``geodesic_mean`` -- the Fréchet mean under that metric, which decouples
  into independent means of the start and end points.

Every function is pure; instances are immutable and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, SpaceMismatchError
from .spaces import Space
from .spaces.base import as_batch, check_weights


def _frozen_point(space, value):
    arr = np.array(value, dtype=np.float64)
    space.validate(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Constant-speed geodesic, stored as its ordered endpoint pair."""

    start: np.ndarray
    end: np.ndarray
    space: Space = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "start", _frozen_point(self.space, self.start))
        object.__setattr__(self, "end", _frozen_point(self.space, self.end))

    @classmethod
    def identity(cls, space, point) -> "Geodesic":
        """Degenerate geodesic from ``point`` to itself."""
        return cls(point, point, space)

    def point_at(self, t: float) -> np.ndarray:
        """Point ``t`` of the way from start to end."""
        return self.space.interpolate(self.start, self.end, t)

    def length(self) -> float:
        return self.space.dist(self.start, self.end)

    def allclose(self, other: "Geodesic", atol=1e-12) -> bool:
        return (
            self.space == other.space
            and np.allclose(self.start, other.start, atol=atol)
            and np.allclose(self.end, other.end, atol=atol)
        )


def _common_space(g1: Geodesic, g2: Geodesic) -> Space:
    if g1.space != g2.space:
        raise SpaceMismatchError(
            f"geodesics live in different spaces: {g1.space!r} vs {g2.space!r}"
        )
    return g1.space


def geo_dist(g1: Geodesic, g2: Geodesic) -> float:
    """Distance between geodesics: sqrt(d(start1, start2)^2 + d(end1, end2)^2)."""
    space = _common_space(g1, g2)
    ds = space.dist(g1.start, g2.start)
    de = space.dist(g1.end, g2.end)
    return float(np.hypot(ds, de))


def geo_scale(g: Geodesic, nu: float) -> Geodesic:
    """Initial segment of ``g`` covering the fraction ``nu`` of its length."""
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"scale factor nu={nu} outside [0, 1]")
    return Geodesic(g.start, g.space.interpolate(g.start, g.end, nu), g.space)


def geo_reverse(g: Geodesic) -> Geodesic:
    """The same geodesic traversed backwards."""
    return Geodesic(g.end, g.start, g.space)


def geo_add(g1: Geodesic, g2: Geodesic) -> Geodesic:
    """Chain ``g2`` onto ``g1``: transport ``g2``'s displacement to ``g1.end``.

    When ``g2.start == g1.end`` this is plain end-to-end concatenation.
    """
    space = _common_space(g1, g2)
    new_end = space.transport(g2.start, g2.end, g1.end)
    return Geodesic(g1.start, new_end, space)


def frechet_mean(space: Space, points, weights=None) -> np.ndarray:
    """Weighted Fréchet mean of points, delegated to the backend.

    Raises ``ValueError`` on an empty input and propagates the backend's
    :class:`ConvergenceError` when an iterative solver fails.
    """
    points = as_batch(points, space.point_dim)
    if points.shape[0] == 0:
        raise ValueError("cannot average an empty set of points")
    return space.mean(points, weights)


def geodesic_mean(geodesics, weights=None) -> Geodesic:
    """Fréchet mean of geodesics under ``geo_dist``.

    The objective separates over endpoints, so the minimizer is the geodesic
    joining the mean of the starts to the mean of the ends.
    """
    geodesics = list(geodesics)
    if not geodesics:
        raise ValueError("cannot average an empty set of geodesics")
    space = geodesics[0].space
    for g in geodesics[1:]:
        if g.space != space:
            raise SpaceMismatchError("geodesics live in different spaces")
    weights = check_weights(weights, len(geodesics))
    starts = np.stack([g.start for g in geodesics])
    ends = np.stack([g.end for g in geodesics])
    return Geodesic(space.mean(starts, weights), space.mean(ends, weights), space)


__all__ = [
    "Geodesic",
    "geo_dist",
    "geo_scale",
    "geo_reverse",
    "geo_add",
    "frechet_mean",
    "geodesic_mean",
    "ConvergenceError",
]
