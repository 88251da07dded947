"""Contract properties every backend must satisfy, on randomized inputs."""

import numpy as np
import pytest

from fgboost.errors import PointValidationError

N_RANDOM = 200
METRIC_TOL = 1e-9


def test_metric_axioms(space_case, rng):
    space = space_case.space
    for _ in range(N_RANDOM):
        a, b, c = (space_case.sampler(rng) for _ in range(3))
        dab = space.dist(a, b)
        assert space.dist(a, a) <= METRIC_TOL
        assert dab >= 0.0
        assert abs(dab - space.dist(b, a)) <= METRIC_TOL
        assert space.dist(a, c) <= dab + space.dist(b, c) + METRIC_TOL


def test_interpolation_endpoints_exact(space_case, rng):
    space = space_case.space
    for _ in range(50):
        a, b = space_case.sampler(rng), space_case.sampler(rng)
        assert np.array_equal(space.interpolate(a, b, 0.0), a)
        assert np.array_equal(space.interpolate(a, b, 1.0), b)


def test_constant_speed(space_case, rng):
    space = space_case.space
    for _ in range(N_RANDOM):
        a, b = space_case.sampler(rng), space_case.sampler(rng)
        d = space.dist(a, b)
        s, t = sorted(rng.uniform(0.0, 1.0, 2))
        seg = space.dist(space.interpolate(a, b, s), space.interpolate(a, b, t))
        assert seg == pytest.approx((t - s) * d, rel=1e-6, abs=1e-9)


def test_transport_identity(space_case, rng):
    space = space_case.space
    for _ in range(N_RANDOM):
        a, b = space_case.sampler(rng), space_case.sampler(rng)
        assert space.dist(space.transport(a, b, a), b) <= METRIC_TOL


def test_midpoint_curvature_bound(space_case, rng):
    if not space_case.flat:
        pytest.skip("bound not expected on the sphere")
    space = space_case.space
    for _ in range(N_RANDOM):
        w1, w2, beta = (space_case.sampler(rng) for _ in range(3))
        mid = space.interpolate(w1, w2, 0.5)
        lhs = space.dist(beta, mid) ** 2
        rhs = (
            0.5 * space.dist(beta, w1) ** 2
            + 0.5 * space.dist(beta, w2) ** 2
            - 0.25 * space.dist(w1, w2) ** 2
        )
        assert lhs <= rhs + 1e-8


def test_mean_single_point_is_identity(space_case, rng):
    space = space_case.space
    p = space_case.sampler(rng)
    assert np.allclose(space.mean(p[None, :]), p, atol=1e-12)


def test_mean_first_order_optimality(space_case, rng):
    space = space_case.space
    pts = space_case.points(rng, 12)
    mean = space.mean(pts)

    def objective(candidate):
        return sum(space.dist(p, candidate) ** 2 for p in pts)

    base = objective(mean)
    for _ in range(20):
        target = space_case.sampler(rng)
        d = space.dist(mean, target)
        if d < 1e-6:
            continue
        nudged = space.interpolate(mean, target, min(1.0, 1e-3 / d))
        assert base <= objective(nudged) + 1e-9


def test_mean_weights_validated(space_case, rng):
    space = space_case.space
    pts = space_case.points(rng, 3)
    with pytest.raises(ValueError):
        space.mean(pts, weights=np.array([0.5, 0.5, 0.5]))
    with pytest.raises(ValueError):
        space.mean(pts, weights=np.array([-0.5, 1.0, 0.5]))
    with pytest.raises(ValueError):
        space.mean(np.empty((0, space.point_dim)))


def test_validate_rejects_garbage(space_case):
    space = space_case.space
    with pytest.raises(PointValidationError):
        space.validate(np.full(space.point_dim, np.nan))


def test_batch_helpers_match_pointwise(space_case, rng):
    space = space_case.space
    A = space_case.points(rng, 10)
    B = space_case.points(rng, 10)
    d2 = space.dist2_batch(A, B)
    for i in range(10):
        assert d2[i] == pytest.approx(space.dist(A[i], B[i]) ** 2, rel=1e-10, abs=1e-12)
    start, end = space_case.sampler(rng), space_case.sampler(rng)
    moved = space.transport_batch(start, end, A)
    for i in range(10):
        assert np.allclose(moved[i], space.transport(start, end, A[i]), atol=1e-12)
