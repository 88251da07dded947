"""Wasserstein backend: grid conventions, Gaussian closed forms, sampling."""

import numpy as np
import pytest
from scipy.special import ndtri

from fgboost.errors import GridMismatchError, PointValidationError
from fgboost.spaces import (
    WassersteinSpace,
    midpoint_grid,
    pav_nondecreasing,
    pwl_evaluate,
    quantile_from_sample,
)

M = 100
SPACE = WassersteinSpace(grid_size=M)
P = midpoint_grid(M)


def gaussian_grid(mean, sd, m=M):
    return mean + sd * ndtri(midpoint_grid(m))


def delta_grid(c, m=M):
    return np.full(m, float(c))


class TestDistance:
    def test_identical_grids(self, rng):
        q = gaussian_grid(0.3, 1.2)
        assert SPACE.dist(q, q) == 0.0

    def test_point_masses(self):
        assert SPACE.dist(delta_grid(0), delta_grid(1)) == pytest.approx(1.0)

    def test_mean_shift_gaussians(self):
        # the quantile difference is the constant 1
        a = gaussian_grid(0.0, 1.0)
        b = gaussian_grid(1.0, 1.0)
        assert SPACE.dist(a, b) == pytest.approx(1.0, abs=1e-6)

    def test_grid_mismatch_raises(self):
        with pytest.raises(GridMismatchError):
            SPACE.dist(delta_grid(0), delta_grid(0, m=7))


class TestInterpolate:
    def test_point_mass_midpoint(self):
        mid = SPACE.interpolate(delta_grid(0), delta_grid(2), 0.5)
        assert np.allclose(mid, delta_grid(1))

    def test_gaussian_displacement_midpoint(self):
        # (1-t) * F^-1(N(0,1)) + t * (2 + 3 F^-1) at t=0.5 is 1 + 2 F^-1
        mid = SPACE.interpolate(gaussian_grid(0, 1), gaussian_grid(2, 3), 0.5)
        assert np.allclose(mid, gaussian_grid(1, 2), atol=1e-12)


class TestTransport:
    def test_identity_roundtrip_exact(self, rng):
        a = np.sort(rng.normal(0, 1, M))
        b = np.sort(rng.normal(2, 3, M))
        assert np.array_equal(SPACE.transport(a, b, a), b)

    def test_degenerate_geodesic_is_identity(self, rng):
        a = np.sort(rng.normal(0, 1, M))
        w = np.sort(rng.normal(1, 2, M))
        assert np.array_equal(SPACE.transport(a, a, w), w)

    def test_mean_shift_map(self):
        # geodesic N(0,1) -> N(1,1) transports by x + 1 wherever the moved
        # point's values stay inside the start grid's range
        g_start = gaussian_grid(0, 1)
        g_end = gaussian_grid(1, 1)
        w = gaussian_grid(1, 0.5)
        out = SPACE.transport(g_start, g_end, w)
        assert np.allclose(out, w + 1.0, atol=1e-9)

    def test_scale_map(self):
        # geodesic N(0,1) -> N(0,4) transports by x -> 2x
        out = SPACE.transport(
            gaussian_grid(0, 1), gaussian_grid(0, 2), gaussian_grid(0, 0.5)
        )
        assert np.allclose(out, gaussian_grid(0, 1), atol=1e-9)

    def test_clamps_outside_start_range(self):
        # values beyond the start grid land on the last grid probability
        a = gaussian_grid(0, 1)
        b = gaussian_grid(1, 1)
        w = delta_grid(50.0)
        out = SPACE.transport(a, b, w)
        assert np.allclose(out, b[-1])

    def test_composition_matches_closed_form(self):
        # map of (N(0,1) -> N(1,1)) after (N(0,1) -> N(0,4)) on a compatible
        # query grid: first 2x then +1 = 2x + 1
        w = gaussian_grid(0, 0.5)
        step1 = SPACE.transport(gaussian_grid(0, 1), gaussian_grid(0, 2), w)
        step2 = SPACE.transport(gaussian_grid(0, 1), gaussian_grid(1, 1), step1)
        assert np.allclose(step2, gaussian_grid(1, 1), atol=1e-9)

    def test_support_bounds_clip(self):
        space = WassersteinSpace(grid_size=M, support=(-2.0, 2.0))
        a = np.clip(gaussian_grid(0, 1), -2, 2)
        b = np.clip(gaussian_grid(1.5, 1), -2, 2)
        out = space.transport(a, b, a)
        assert out.max() <= 2.0 and out.min() >= -2.0


class TestMean:
    def test_point_masses(self):
        mean = SPACE.mean(np.stack([delta_grid(0), delta_grid(2)]))
        assert np.allclose(mean, delta_grid(1))

    def test_minimality_against_random_candidates(self, rng):
        pts = np.stack([np.sort(rng.normal(rng.normal(), 1, M)) for _ in range(5)])
        mean = SPACE.mean(pts)
        objective = lambda c: float(np.sum(SPACE.dist2_batch(pts, np.tile(c, (5, 1)))))
        base = objective(mean)
        for _ in range(200):
            cand = np.sort(rng.normal(rng.normal(), rng.uniform(0.5, 2), M))
            assert base <= objective(cand) + 1e-12

    def test_weighted(self):
        mean = SPACE.mean(
            np.stack([delta_grid(0), delta_grid(10)]), weights=np.array([0.9, 0.1])
        )
        assert np.allclose(mean, delta_grid(1.0))


class TestQuantileFromSample:
    def test_constant_sample(self):
        assert np.array_equal(quantile_from_sample([3.5] * 7, 10), np.full(10, 3.5))

    def test_two_point_sample_m2(self):
        assert np.array_equal(quantile_from_sample([0.0, 1.0], 2), np.array([0.0, 1.0]))

    def test_two_point_sample_m4(self):
        # order statistics sit at p = 0.25, 0.75; the m=4 grid queries
        # p = 0.125, 0.375, 0.625, 0.875 -> clamp, lerp(0.25), lerp(0.75), clamp
        out = quantile_from_sample([1.0, 0.0], 4)
        assert np.allclose(out, [0.0, 0.25, 0.75, 1.0])

    def test_sample_size_equals_grid_is_sorted_sample(self, rng):
        obs = rng.normal(0, 1, 50)
        assert np.array_equal(quantile_from_sample(obs, 50), np.sort(obs))

    def test_permutation_invariance(self, rng):
        obs = rng.normal(0, 1, 33)
        a = quantile_from_sample(obs, 10)
        b = quantile_from_sample(obs[rng.permutation(33)], 10)
        assert np.array_equal(a, b)

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            quantile_from_sample([], 10)

    def test_law_of_large_numbers(self):
        draws = np.random.default_rng(99).normal(0.0, 1.0, 100_000)
        emp = quantile_from_sample(draws, M)
        assert SPACE.dist(emp, gaussian_grid(0, 1)) < 0.02


class TestPwlAndPav:
    def test_exact_knot_hits(self):
        kx = np.array([0.0, 1.0, 1.0, 2.0])
        ky = np.array([10.0, 20.0, 30.0, 40.0])
        assert pwl_evaluate(kx, ky, 1.0) == pytest.approx(25.0)  # flat-run midpoint
        assert pwl_evaluate(kx, ky, 0.0) == 10.0
        assert pwl_evaluate(kx, ky, 0.5) == pytest.approx(15.0)
        assert pwl_evaluate(kx, ky, -3.0) == 10.0
        assert pwl_evaluate(kx, ky, 9.0) == 40.0

    def test_constant_knots(self):
        kx = np.zeros(3)
        ky = np.array([1.0, 2.0, 3.0])
        assert pwl_evaluate(kx, ky, 0.0) == 2.0  # even-length run -> middle knot
        assert pwl_evaluate(kx, ky, -1.0) == 1.0
        assert pwl_evaluate(kx, ky, 1.0) == 3.0

    def test_pav_pools_violators(self):
        out = pav_nondecreasing(np.array([1.0, 3.0, 2.0, 2.0, 4.0]))
        assert np.allclose(out, [1.0, 7 / 3, 7 / 3, 7 / 3, 4.0])
        assert np.all(np.diff(out) >= 0)

    def test_pav_noop_on_monotone(self):
        v = np.array([1.0, 1.0, 2.0, 5.0])
        assert pav_nondecreasing(v) is v


class TestValidation:
    def test_non_monotone_rejected(self):
        with pytest.raises(PointValidationError):
            SPACE.validate(np.linspace(1, 0, M))

    def test_support_bound_violation(self):
        space = WassersteinSpace(grid_size=4, support=(0.0, 1.0))
        with pytest.raises(PointValidationError):
            space.validate(np.array([0.0, 0.5, 0.9, 1.5]))
