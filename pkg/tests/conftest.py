"""Shared test fixtures: random valid points for every space backend."""

import numpy as np
import pytest

from fgboost.spaces import (
    EuclideanSpace,
    LaplacianSpace,
    SphereSpace,
    WassersteinSpace,
)


def rand_quantile(rng, m=20, loc_scale=2.0, spread=1.5):
    """Strictly increasing quantile grid of a random continuous law."""
    loc = rng.normal(0.0, loc_scale)
    scale = rng.uniform(0.2, spread)
    return np.sort(loc + scale * rng.normal(0.0, 1.0, m))


def rand_laplacian(rng, l=4, max_weight=1.0):
    w = rng.uniform(0.0, max_weight, (l, l))
    w = 0.5 * (w + w.T)
    np.fill_diagonal(w, 0.0)
    mat = -w
    np.fill_diagonal(mat, w.sum(axis=1))
    return mat.ravel()


def rand_sphere(rng, d=3, center=None, spread=0.5):
    if center is None:
        center = np.zeros(d)
        center[0] = 1.0
    v = center + rng.normal(0.0, spread, d)
    n = np.linalg.norm(v)
    if n < 1e-9:
        v = center
        n = 1.0
    return v / n


def rand_euclid(rng, d=3):
    return rng.normal(0.0, 2.0, d)


class SpaceCase:
    """A backend plus a sampler of random valid points."""

    def __init__(self, name, space, sampler, flat):
        self.name = name
        self.space = space
        self.sampler = sampler
        self.flat = flat  # satisfies the midpoint (non-positive curvature) bound

    def points(self, rng, k):
        return np.stack([self.sampler(rng) for _ in range(k)])


def make_space_cases():
    return [
        SpaceCase(
            "wasserstein",
            WassersteinSpace(grid_size=20),
            lambda rng: rand_quantile(rng, 20),
            flat=True,
        ),
        SpaceCase(
            "laplacian",
            LaplacianSpace(n_nodes=4),
            lambda rng: rand_laplacian(rng, 4),
            flat=True,
        ),
        SpaceCase(
            "sphere",
            SphereSpace(dim=3),
            lambda rng: rand_sphere(rng, 3),
            flat=False,
        ),
        SpaceCase(
            "euclidean",
            EuclideanSpace(dim=3),
            lambda rng: rand_euclid(rng, 3),
            flat=True,
        ),
    ]


@pytest.fixture(params=make_space_cases(), ids=lambda c: c.name)
def space_case(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)
