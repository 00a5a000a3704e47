import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from holegreen import study
from holegreen.geometry import STRATA, GeometryError, HoleShape, normalize, sample_pairs
from holegreen.oracle import AnnulusSeries, CollocationOracle, OracleError, make_oracle
from holegreen.outer_kernel import OuterKernel

from .conftest import ball_config


def annulus_points(rng, n, count, lo, hi):
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1)[:, None]
    return (lo + (hi - lo) * rng.random(count))[:, None] * d


@pytest.mark.parametrize("n", [2, 3])
def test_series_vanishes_on_both_boundaries(rng, n):
    series = AnnulusSeries(n, 0.1)
    y = annulus_points(rng, n, 40, 0.15, 0.9)
    for radius in (1.0, 0.1):
        x = annulus_points(rng, n, 40, radius, radius)
        assert np.max(np.abs(series.green(x, y))) <= 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_series_symmetry(rng, n):
    series = AnnulusSeries(n, 0.1)
    x = annulus_points(rng, n, 100, 0.1, 1.0)
    y = annulus_points(rng, n, 100, 0.1, 1.0)
    assert np.max(np.abs(series.regular(x, y) - series.regular(y, x))) <= 1e-11


def test_series_without_hole_tends_to_ball_green(rng):
    series = AnnulusSeries(3, 1e-8)
    ball = OuterKernel(ball_config(3))
    x = annulus_points(rng, 3, 50, 0.2, 0.9)
    y = annulus_points(rng, 3, 50, 0.2, 0.9)
    assert np.max(np.abs(series.green(x, y) - ball.green(x, y))) <= 1e-7


def test_series_truncation_adapts_to_eps():
    assert AnnulusSeries(3, 0.2).truncation > AnnulusSeries(3, 0.02).truncation


def test_series_rejects_points_outside_annulus():
    with pytest.raises(GeometryError):
        AnnulusSeries(3, 0.1).green([0.05, 0, 0], [0.5, 0, 0])


def test_series_needs_concentric_ball():
    with pytest.raises(OracleError):
        AnnulusSeries.from_config(ball_config(3, center=(0.3, 0, 0), radius=1.3))


def test_series_potential_is_exact_capacitary_potential():
    series = AnnulusSeries(2, 0.1)
    assert_allclose(series.potential([0.1, 0.0]), 1.0)
    assert_allclose(series.potential([0.0, 1.0]), 0.0, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3])
def test_collocation_matches_series_on_concentric_scene(n):
    cfg = ball_config(n, eps=0.1)
    col, series = CollocationOracle(cfg), AnnulusSeries.from_config(cfg)
    xs, ys = zip(*(sample_pairs(cfg, 5, 0, s) for s in STRATA))
    x, y = np.vstack(xs), np.vstack(ys)
    assert np.max(np.abs(col.green(x, y) - series.green(x, y))) <= 1e-8


def test_collocation_potential_boundary_and_maximum_principle(rng):
    cfg = ball_config(2, eps=0.1, center=(0.3, 0.0), radius=1.3, hole=HoleShape.fourier([1.0, 0.25]))
    cfg = normalize(cfg)
    oracle = CollocationOracle(cfg)
    t = np.linspace(0, 2 * math.pi, 50, endpoint=False)
    d = np.column_stack([np.cos(t), np.sin(t)])
    on_hole = cfg.epsilon * cfg.hole.radius(d)[:, None] * d * (1 + 1e-12)
    assert np.max(np.abs(oracle.potential(on_hole) - 1.0)) <= 1e-9
    x = np.vstack([sample_pairs(cfg, 250, 5, s)[0] for s in STRATA])
    p = oracle.potential(x)
    assert np.all((p > 0) & (p < 1))


def test_collocation_green_vanishes_on_offcenter_boundary():
    cfg = ball_config(3, eps=0.1, center=(0.3, 0, 0), radius=1.3)
    oracle = CollocationOracle(cfg)
    d = np.array([[1.0, 0, 0], [-1.0, 0, 0], [0, 0.6, 0.8]])
    x = np.array([0.3, 0, 0]) + 1.3 * d * (1 - 1e-12)
    y = np.tile([0.2, 0.3, -0.1], (3, 1))
    assert np.max(np.abs(oracle.green(x, y))) <= 1e-9
    assert oracle.last_residual <= 1e-9


def test_collocation_symmetry_for_general_hole(scenes):
    cfg = scenes("egg2-offcenter").config.with_epsilon(0.1)
    oracle = CollocationOracle(cfg)
    x, y = sample_pairs(cfg, 100, 3, "near-hole")
    assert_allclose(oracle.regular(x, y), oracle.regular(y, x), atol=1e-9)


def test_collocation_reports_unresolved_solves():
    cfg = ball_config(3, eps=0.1, center=(0.3, 0, 0), radius=1.3)
    oracle = CollocationOracle(cfg, outer_sources=40, hole_sources=20)
    with pytest.raises(OracleError):
        oracle.regular([[0.5, 0.1, 0.0]], [[-0.2, 0.3, 0.1]])


def test_make_oracle_dispatch():
    assert isinstance(make_oracle(ball_config(3)), AnnulusSeries)
    assert isinstance(make_oracle(ball_config(3, center=(0.3, 0, 0), radius=1.3)), CollocationOracle)
    assert isinstance(make_oracle(ball_config(2), "collocation"), CollocationOracle)
    with pytest.raises(ValueError):
        make_oracle(ball_config(2), "fem")


def test_offcenter_ball_collocation_against_perturbation_free_limit():
    """As eps -> 0 the collocation G_eps approaches the outer-ball G away from the hole."""
    cfg = ball_config(3, eps=1e-4, center=(0.3, 0, 0), radius=1.3)
    oracle = CollocationOracle(cfg)
    outer = OuterKernel(cfg)
    x, y = np.array([[0.5, 0.2, 0.0]]), np.array([[-0.3, 0.4, 0.1]])
    corr = 1e-4 * 4 * math.pi * outer.green_at_origin(x) * outer.green_at_origin(y)
    assert abs(oracle.green(x, y) - outer.green(x, y) + corr)[0] <= 1e-7


def test_presets_build():
    assert set(study.PRESETS) >= {"ball3", "disk2", "ball3-offcenter", "disk2-offcenter"}
