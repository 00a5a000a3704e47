import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from holegreen import collocation as mfs
from holegreen.geometry import GeometryError
from holegreen.outer_kernel import OuterKernel, kelvin_quadratic

from .conftest import ball_config


def kernel(n, center=None, radius=1.0):
    return OuterKernel(ball_config(n, center=center, radius=radius))


def interior_points(rng, n, count, center, radius, shrink=0.9):
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1)[:, None]
    r = shrink * radius * rng.random(count) ** (1 / n)
    return np.asarray(center) + r[:, None] * d


def test_ball_green_hand_value():
    G = kernel(3).green([0.5, 0, 0], [-0.5, 0, 0])
    assert_allclose(G, 1 / (20 * math.pi), rtol=1e-14)


@pytest.mark.parametrize("n,center,radius", [(3, (0, 0, 0), 1.0), (3, (0.3, 0, 0), 1.3),
                                             (2, (0, 0), 1.0), (2, (0.3, 0), 1.3), (4, (0, 0, 0, 0), 1.0)])
def test_green_vanishes_on_outer_boundary(rng, n, center, radius):
    k = kernel(n, center, radius)
    d = rng.standard_normal((50, n))
    d /= np.linalg.norm(d, axis=1)[:, None]
    x = np.asarray(center) + radius * d
    y = interior_points(rng, n, 50, center, radius, 0.8)
    assert np.max(np.abs(k.green(x, y))) < 1e-13


@pytest.mark.parametrize("n,center,radius", [(3, (0.3, 0, 0), 1.3), (2, (0.3, 0), 1.3)])
def test_regular_part_is_symmetric(rng, n, center, radius):
    k = kernel(n, center, radius)
    x = interior_points(rng, n, 200, center, radius)
    y = interior_points(rng, n, 200, center, radius)
    a, b = k.regular(x, y), k.regular(y, x)
    assert np.max(np.abs(a - b) / np.abs(a)) <= 1e-14


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-0.6, 0.6), min_size=6, max_size=6))
def test_green_symmetry_property(coords):
    k = kernel(3, (0.3, 0, 0), 1.3)
    x, y = np.array(coords[:3]), np.array(coords[3:])
    if np.linalg.norm(x - y) < 1e-3:
        return
    a, b = k.green(x, y), k.green(y, x)
    assert abs(a - b) <= 1e-14 * abs(a) + 1e-300


@pytest.mark.parametrize("n,center,radius", [(3, (0.3, 0, 0), 1.3), (2, (0.3, 0), 1.3)])
def test_regular_part_is_harmonic(rng, n, center, radius):
    k = kernel(n, center, radius)
    h = 1e-3
    x = interior_points(rng, n, 20, center, radius, 0.7)
    y = interior_points(rng, n, 20, center, radius, 0.7)
    lap = -2 * n * k.regular(x, y)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        lap = lap + k.regular(x + e, y) + k.regular(x - e, y)
    assert np.max(np.abs(lap / h**2)) <= 1e-6


def test_regular_part_at_centre_of_unit_ball_is_constant(rng):
    k = kernel(3)
    x = interior_points(rng, 3, 100, (0, 0, 0), 1.0)
    assert_allclose(k.regular_at_origin_y(x), 1 / (4 * math.pi), rtol=1e-14)
    assert_allclose(k.regular_at_origin_x(x), 1 / (4 * math.pi), rtol=1e-14)


def test_origin_limits_match_nearby_values(rng):
    k = kernel(3, (0.3, 0, 0), 1.3)
    x = interior_points(rng, 3, 20, (0.3, 0, 0), 1.3)
    tiny = np.array([1e-7, -2e-7, 1e-7])
    assert_allclose(k.regular_at_origin_y(x), k.regular(x, np.broadcast_to(tiny, x.shape)), rtol=1e-6)
    assert_allclose(k.regular_origin(), k.regular(tiny, -tiny), rtol=1e-6)


def test_unit_disk_conformal_radius():
    k = kernel(2)
    assert abs(k.regular_origin()) < 1e-15
    assert_allclose(k.conformal_radius(), 1.0)


def test_offcenter_disk_regular_origin_closed_form():
    k = kernel(2, (0.3, 0), 1.3)
    expected = -math.log(1.3 * (1 - 0.09 / 1.69)) / (2 * math.pi)
    assert_allclose(k.regular_origin(), expected, rtol=1e-14)
    assert_allclose(k.conformal_radius(), 1.3 * (1 - 0.09 / 1.69), rtol=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_regular_origin_against_independent_collocation(n):
    """H(0,0) from a fundamental-solution solve on the outer ball alone."""
    center = np.array([0.3] + [0.0] * (n - 1))
    k = kernel(n, tuple(center), 1.3)
    consts = k.constants
    count = 200 if n == 2 else 600
    sources = center + 2.0 * 1.3 * mfs.unit_directions(n, count, 0.5)
    nodes = center + 1.3 * mfs.unit_directions(n, 2 * count)
    basis = mfs.SourceBasis(consts, sources, constant=(n == 2))
    design, _ = basis.design(nodes)
    w = mfs.RegularizedSolver(design).solve(consts.fundamental(np.linalg.norm(nodes, axis=1)))
    value = basis.evaluate(np.zeros((1, n)), w)[0]
    assert_allclose(value, k.regular_origin(), atol=1e-9)


def test_kelvin_quadratic_is_squared_distance_to_reflection():
    x, y = np.array([0.2, 0.1, -0.3]), np.array([0.4, -0.2, 0.1])
    c, R = np.array([0.3, 0.0, 0.0]), 1.3
    ystar = c + R**2 * (y - c) / np.sum((y - c) ** 2)
    expected = np.sum((y - c) ** 2) / R**2 * np.sum((x - ystar) ** 2)
    assert_allclose(kelvin_quadratic(x, y, c, R), expected, rtol=1e-14)


def test_coincident_points_rejected():
    with pytest.raises(GeometryError):
        kernel(3).green([0.1, 0, 0], [0.1, 0, 0])


def test_points_outside_rejected():
    with pytest.raises(GeometryError):
        kernel(3).green([1.1, 0, 0], [0.1, 0, 0])
