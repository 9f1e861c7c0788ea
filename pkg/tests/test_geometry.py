import math

import pytest
from pytest import approx
import numpy as np

from spannerlab.geometry import (
    Point, ConeSpec, cone_bounds, dist, dist_many, cone_index,
    cone_index_many, in_ellipse, ellipse_axes, ellipse_square_area,
    SpatialGrid
)


class TestPoint:

    @staticmethod
    def test_checked():
        assert Point.checked(0., 1.) == (0., 1.)

    @staticmethod
    @pytest.mark.parametrize('x, y', [(-0.1, 0.5), (0.5, 1.0001)])
    def test_checked_out_of_domain(x, y):
        with pytest.raises(ValueError, match="coordinate out of domain"):
            Point.checked(x, y)


class TestConeSpec:

    @staticmethod
    @pytest.mark.parametrize('epsilon, tau', [
        (0.25, 26),
        (0.2, 32),
        (0.3, 21),
        (math.pi / 2, 4),
    ])
    def test_tau(epsilon, tau):
        spec = ConeSpec(epsilon)
        assert spec.tau == tau
        assert (spec.tau - 1) * spec.epsilon < 2 * math.pi
        assert spec.tau * spec.epsilon >= 2 * math.pi

    @staticmethod
    @pytest.mark.parametrize('epsilon', [0., -0.1, 1.6])
    def test_bad_epsilon(epsilon):
        with pytest.raises(ValueError):
            ConeSpec(epsilon)

    @staticmethod
    def test_bounds():
        spec = ConeSpec(0.25)
        assert cone_bounds(0, spec) == approx((0., 0.25, 0.125))
        lower, upper, mid = cone_bounds(25, spec)
        assert lower == approx(6.25)
        assert upper == 2 * math.pi
        assert mid == approx((6.25 + 2 * math.pi) / 2)
        with pytest.raises(ValueError):
            spec.bounds(26)

    @staticmethod
    def test_bisectors():
        spec = ConeSpec(math.pi / 2)
        assert spec.bisectors() == approx(
            [math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4])


class TestDistance:

    @staticmethod
    def test_dist():
        assert dist((0., 0.), (0.3, 0.4)) == approx(0.5)
        assert dist((0.2, 0.2), (0.2, 0.2)) == 0.

    @staticmethod
    def test_dist_many_matches_dist():
        rng = np.random.default_rng(3)
        a = rng.random((50, 2))
        b = rng.random((50, 2))
        many = dist_many(a, b)
        # bitwise, not approximately
        assert all(many[i] == dist(a[i], b[i]) for i in range(50))

    @staticmethod
    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_metric(seed):
        rng = np.random.default_rng(seed)
        a, b, c = rng.random((3, 200, 2))
        ab = dist_many(a, b)
        assert np.array_equal(ab, dist_many(b, a))
        assert np.all(dist_many(a, c) <= ab + dist_many(b, c) + 1e-12)
        assert np.all(dist_many(a, a) == 0.)


class TestConeIndex:

    @staticmethod
    @pytest.mark.parametrize('target, expected', [
        ((0.9, 0.5), 0),
        ((0.5, 0.9), 6),     # pi/2 / 0.25 = 6.28
        ((0.1, 0.5), 12),    # pi / 0.25 = 12.57
        ((0.5, 0.1), 18),    # 3pi/2 / 0.25 = 18.85
        ((0.9, 0.49999999), 25),
    ])
    def test_cone_index(target, expected):
        assert cone_index((0.5, 0.5), target, ConeSpec(0.25)) == expected

    @staticmethod
    def test_coincident():
        with pytest.raises(ValueError, match="undefined direction"):
            cone_index((0.5, 0.5), (0.5, 0.5), ConeSpec(0.25))

    @staticmethod
    def test_many_matches_scalar():
        spec = ConeSpec(0.3)
        rng = np.random.default_rng(5)
        apex = rng.random((200, 2))
        target = rng.random((200, 2))
        target[0] = apex[0]
        many = cone_index_many(apex, target, spec)
        assert many[0] == -1
        assert all(many[i] == cone_index(apex[i], target[i], spec)
                   for i in range(1, 200))


class TestEllipse:

    @staticmethod
    def test_boundary_included():
        a, b = (0.25, 0.5), (0.75, 0.5)
        # end of the major axis, at distance (1+eps)r/2 from the centre
        x = (0.875, 0.5)
        assert in_ellipse(a, b, 0.5, x)
        assert not in_ellipse(a, b, 0.5, (x[0] + 1e-6, 0.5))

    @staticmethod
    def test_foci_inside():
        a, b = (0.25, 0.5), (0.75, 0.5)
        assert in_ellipse(a, b, 0.1, a)
        assert in_ellipse(a, b, 0., (0.5, 0.5))
        assert not in_ellipse(a, b, 0., (0.5, 0.51))

    @staticmethod
    @pytest.mark.parametrize('epsilon', [0., 0.1, 0.7])
    def test_foci_swap(epsilon):
        rng = np.random.default_rng(11)
        a, b = rng.random((2, 2))
        for x in rng.random((500, 2)):
            assert in_ellipse(a, b, epsilon, x) == in_ellipse(b, a, epsilon, x)

    @staticmethod
    def test_degenerate():
        with pytest.raises(ValueError, match="degenerate ellipse"):
            in_ellipse((0.3, 0.3), (0.3, 0.3), 0.2, (0.1, 0.1))

    @staticmethod
    def test_axes():
        major, minor = ellipse_axes((0., 0.), (0.4, 0.), 0.25)
        assert major == approx(0.25)
        assert minor == approx(math.sqrt(0.5625) * 0.2)


class TestEllipseSquareArea:

    @staticmethod
    def test_interior_is_exact():
        a, b = (0.4, 0.5), (0.6, 0.5)
        major, minor = ellipse_axes(a, b, 0.25)
        assert ellipse_square_area(a, b, 0.25) == math.pi * major * minor

    @staticmethod
    def test_interior_by_quadrature():
        a, b = (0.4, 0.45), (0.55, 0.6)
        major, minor = ellipse_axes(a, b, 0.25)
        area = ellipse_square_area(a, b, 0.25, exact_interior=False)
        assert area == approx(math.pi * major * minor, abs=1e-7)

    @staticmethod
    def test_half_outside():
        # centred on the bottom edge, symmetric about y = 0
        a, b = (0.3, 0.), (0.7, 0.)
        major, minor = ellipse_axes(a, b, 0.25)
        area = ellipse_square_area(a, b, 0.25)
        assert area == approx(math.pi * major * minor / 2, abs=1e-7)

    @staticmethod
    def test_quarter_outside():
        a, b = (0., 0.), (0.2, 0.2)
        # rotated ellipse about the corner, compared with a fine grid
        area = ellipse_square_area(a, b, 0.3)
        h = 1 / 1000
        xs = (np.arange(1000) + 0.5) * h
        gx, gy = np.meshgrid(xs, xs)
        inside = (np.hypot(gx - a[0], gy - a[1]) +
                  np.hypot(gx - b[0], gy - b[1]) <=
                  1.3 * dist(a, b))
        assert area == approx(inside.sum() * h * h, abs=2e-3)

    @staticmethod
    def test_zero_epsilon():
        assert ellipse_square_area((0.1, 0.1), (0.5, 0.5), 0.) == 0.


class TestSpatialGrid:

    @staticmethod
    @pytest.mark.parametrize('n, radius', [(100, 0.2), (300, 0.08), (5, 0.5)])
    def test_pairs_within_brute_force(n, radius):
        points = np.random.default_rng(n).random((n, 2))
        u, v = SpatialGrid(points, radius).pairs_within(radius)

        i, j = np.triu_indices(n, k=1)
        keep = dist_many(points[i], points[j]) <= radius
        assert np.array_equal(u, i[keep])
        assert np.array_equal(v, j[keep])

    @staticmethod
    def test_radius_too_large():
        grid = SpatialGrid(np.random.default_rng(0).random((10, 2)), 0.1)
        with pytest.raises(ValueError):
            grid.pairs_within(0.2)

    @staticmethod
    def test_bad_side():
        with pytest.raises(ValueError):
            SpatialGrid(np.zeros((1, 2)), 0.)
