"""
Tests for phase clouds, geodesic circles and closure dimension
"""

import numpy as np
import pytest

from conftest import shell_from_log
from core.exceptions import DegenerateScalesError, EmptyAfterCutoffError
from geometry.maps import wrapped_difference
from phase.coamoeba import (PhaseCloud, candidate_slopes, closure_dimension, detect_geodesic_circles,
                            phase_cloud)
from sampling.sampler import sample_shells
from sampling.variety import IMPLICIT, ShellSample, parse_variety


def antidiagonal_cloud(count: int = 2000, seed: int = 0) -> PhaseCloud:
    theta = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, count)
    return PhaseCloud(np.mod(np.column_stack([theta, -theta]), 2 * np.pi), np.full(count, 30.0))


def uniform_cloud(count: int, seed: int = 0) -> PhaseCloud:
    return PhaseCloud(np.random.default_rng(seed).uniform(0.0, 2 * np.pi, (count, 2)), np.full(count, 30.0))


def test_phases_of_a_binomial_curve():
    rng = np.random.default_rng(1)
    x = rng.uniform(20.0, 25.0, 500)
    theta = rng.uniform(0.0, 2 * np.pi, 500)
    sample = shell_from_log(np.column_stack([x, -x]), 30.0, phases=np.column_stack([theta, -theta]))
    cloud = phase_cloud([sample])
    assert cloud.angles.shape == (500, 2)
    assert np.all((cloud.angles >= 0) & (cloud.angles < 2 * np.pi))
    assert np.allclose(wrapped_difference(cloud.angles.sum(axis=1), 0.0), 0.0, atol=1e-9)


def test_cutoff_and_tentacle_restriction():
    near = shell_from_log(np.array([[5.0, 0.0], [0.0, 5.0]]), 5.0)
    far = shell_from_log(np.array([[-40.0, 0.1], [0.2, -40.0]]), 40.0)
    assert len(phase_cloud([near, far], 10.0)) == 2
    assert len(phase_cloud([near, far], 0.0, direction=(-1.0, 0.0), eps=0.05)) == 1
    with pytest.raises(EmptyAfterCutoffError):
        phase_cloud([near], 10.0)


def test_direction_needs_eps():
    sample = shell_from_log(np.array([[5.0, 0.0]]), 5.0)
    with pytest.raises(ValueError):
        phase_cloud([sample], 0.0, direction=(1.0, 0.0))


def test_candidate_slopes_are_sign_normalized():
    assert [s.vector for s in candidate_slopes(2, 1)] == [(0, 1), (1, -1), (1, 0), (1, 1)]


def test_antidiagonal_circle_is_found():
    circles = detect_geodesic_circles(antidiagonal_cloud())
    assert len(circles) == 1
    circle = circles[0]
    assert circle.slope.vector == (1, -1)
    assert circle.invariants == ((1, 1),)
    assert abs(float(wrapped_difference(circle.offset[0], 0.0))) < 1e-6
    assert circle.coverage == pytest.approx(1.0)


def test_translation_keeps_the_slope():
    shifted = antidiagonal_cloud().translated((0.7, 2.1))
    circles = detect_geodesic_circles(shifted)
    assert [c.slope.vector for c in circles] == [(1, -1)]
    assert abs(float(wrapped_difference(circles[0].offset[0], 2.8))) < 1e-2


def test_uniform_phases_have_no_circles():
    assert detect_geodesic_circles(uniform_cloud(5000)) == []


def test_closure_dimension_of_a_circle():
    assert closure_dimension(antidiagonal_cloud(5000)) == pytest.approx(1.0, abs=0.15)


def test_closure_dimension_of_the_torus():
    assert closure_dimension(uniform_cloud(20000)) == pytest.approx(2.0, abs=0.15)


def test_closure_dimension_needs_points():
    with pytest.raises(DegenerateScalesError):
        closure_dimension(uniform_cloud(500))


def test_phase_lines_round_trip():
    cloud = antidiagonal_cloud(10)
    back = PhaseCloud.from_lines(cloud.to_lines())
    assert np.array_equal(back.angles, cloud.angles)
    assert np.array_equal(back.radii, cloud.radii)


def test_exponential_curve_phases_fill_the_torus():
    rng = np.random.default_rng(7)
    t = rng.uniform(20.0, 200.0, 20000) * np.exp(1j * rng.uniform(0.0, 2 * np.pi, 20000))
    points = np.column_stack([t, np.exp(t)])
    sample = ShellSample(30.0, float("inf"), points, np.zeros(len(points)), 7)
    assert closure_dimension(phase_cloud([sample])) >= 1.75


@pytest.mark.parametrize("direction, slope", [
    ((-1.0, 0.0), (1, 0)),
    ((0.0, -1.0), (0, 1)),
    ((1.0, 1.0), (1, 1)),
])
def test_each_tentacle_of_the_line_is_one_circle(direction, slope):
    spec = parse_variety("1 + z1 + z2", IMPLICIT, None, None)
    samples = sample_shells(spec, [15.0, 30.0, 60.0], 1500, seed=1)
    cloud = phase_cloud(samples, 0.0, direction, 0.1)
    circles = detect_geodesic_circles(cloud)
    assert [c.slope.vector for c in circles] == [slope]
    assert circles[0].coverage >= 0.9
