"""
Tests for torus maps and rational slope recognition
"""

import numpy as np
import pytest

from core.exceptions import ZeroCoordinateError, ZeroVectorError
from geometry.maps import (angular_distance, arg_angles, direction_of, log_map, rho, rho_inverse,
                           wrapped_difference)
from geometry.slopes import Irrational, RationalSlope, is_rational, primitive, rational_slope_of


def test_log_map():
    assert log_map([np.e, -1.0]) == pytest.approx([1.0, 0.0])


def test_log_map_rejects_zero():
    with pytest.raises(ZeroCoordinateError):
        log_map([1.0, 0.0])


def test_arg_angles_are_wrapped():
    assert arg_angles([-1.0, 1j, -1j]) == pytest.approx([np.pi, np.pi / 2, 3 * np.pi / 2])


def test_rho_maps_into_the_unit_ball():
    y = rho([3.0, 4.0])
    assert y == pytest.approx([0.5, 2 / 3])
    assert rho_inverse(y) == pytest.approx([3.0, 4.0])
    big = rho(np.array([[1e6, -1e6]]))
    assert np.linalg.norm(big) < 1.0


def test_direction_of_zero_vector():
    with pytest.raises(ZeroVectorError):
        direction_of([0.0, 0.0])


def test_angular_distance():
    assert angular_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(np.pi / 2)
    assert angular_distance([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(np.pi)


def test_wrapped_difference():
    assert wrapped_difference(0.1, 2 * np.pi - 0.1) == pytest.approx(0.2)


def test_primitive():
    assert primitive((2, -4)) == (1, -2)
    with pytest.raises(ZeroVectorError):
        primitive((0, 0))


def test_slope_must_be_primitive():
    with pytest.raises(ValueError):
        RationalSlope((2, 4))
    assert RationalSlope.of((2, 4)) == RationalSlope((1, 2))


def test_slope_printing_and_sign():
    slope = RationalSlope((-1, 1))
    assert str(slope) == "(-1,1)"
    assert slope.sign_normalized() == RationalSlope((1, -1))
    assert -slope == RationalSlope((1, -1))


@pytest.mark.parametrize("d, expected", [
    ((1.0, 1.0), (1, 1)),
    ((-1.0, 0.0), (-1, 0)),
    ((0.0, -3.0), (0, -1)),
    ((1.0, 2.0001), (1, 2)),
    ((2.0, 3.0, -5.0), (2, 3, -5)),
])
def test_rational_slopes_are_recognized(d, expected):
    slope = rational_slope_of(d)
    assert is_rational(slope)
    assert slope.vector == expected


def test_irrational_direction():
    result = rational_slope_of((1.0, np.pi), Q=12, tol=5e-3)
    assert isinstance(result, Irrational)
    assert result.best == RationalSlope((1, 3))
    assert result.angle > 5e-3


def test_slope_bound_limits_candidates():
    # (5, 7) is within tolerance for Q = 7 but not for Q = 3
    d = (5.0, 7.0)
    assert rational_slope_of(d, Q=7).vector == (5, 7)
    assert not is_rational(rational_slope_of(d, Q=3, tol=1e-3))


def test_slope_of_zero_vector():
    with pytest.raises(ZeroVectorError):
        rational_slope_of((0.0, 0.0))


def test_one_dimensional_slopes():
    assert rational_slope_of((-2.5,)).vector == (-1,)


@pytest.mark.parametrize("n, Q", [(1, 10), (2, 10), (3, 6)])
def test_every_primitive_vector_is_recovered(n, Q):
    rng = np.random.default_rng(n)
    grid = np.stack(np.meshgrid(*[np.arange(-Q, Q + 1)] * n, indexing="ij"), axis=-1).reshape(-1, n)
    vectors = [tuple(int(x) for x in p) for p in grid if np.gcd.reduce(np.abs(p)) == 1]
    assert vectors
    for p in vectors:
        d = np.array(p, dtype=float) / np.linalg.norm(p)
        noise = rng.normal(size=n)
        d = d + 1e-4 * noise / np.linalg.norm(noise)
        assert rational_slope_of(d, Q=Q) == RationalSlope(p)
