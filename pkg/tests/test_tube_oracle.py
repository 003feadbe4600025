import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from gkf_kit import gmf as G
from gkf_kit.errors import InvalidArgument, ProjectionFailure
from gkf_kit import maps
from gkf_kit.tube_oracle import (TubeCurve, distance_to_domain, fit_exact_curve,
                                 fit_tube_coefficients, mc_tube_volume, tube_curve)

RADII = np.linspace(0.0, 0.25, 16)


def test_distance_examples():
    hs = G.HalfSpace([0.0, 1.0], 1.0)
    assert distance_to_domain(hs, [5.0, 0.0]) == pytest.approx(1.0)
    assert distance_to_domain(hs, [5.0, 3.0]) == 0.0
    ball = G.BallComplement(2, 2.0)
    assert distance_to_domain(ball, [0.0, 0.5]) == pytest.approx(1.5)
    assert distance_to_domain(ball, [3.0, 0.0]) == 0.0
    quad = G.Cone2([1.0, 0.0], [0.0, 1.0], [0.0, 0.0])
    assert distance_to_domain(quad, [-3.0, -4.0]) == pytest.approx(5.0)
    assert distance_to_domain(quad, [-2.0, 1.0]) == pytest.approx(2.0)
    assert distance_to_domain(quad, [1.0, 1.0]) == 0.0


def test_f_region_distance_matches_projection():
    dom = G.FRegion(2, 3, 1.2)
    rng = np.random.default_rng(1)
    x = rng.normal(size=(200, 5))
    direct = distance_to_domain(dom, x)
    projected = distance_to_domain(dom.as_implicit(), x)
    np.testing.assert_allclose(direct, projected, atol=1e-8)


def test_implicit_distance_half_space():
    dom = G.Implicit(2, maps.linear([0.6, 0.8]), 1.0, math.inf)
    x = np.array([[0.0, 0.0], [1.0, 2.0]])
    np.testing.assert_allclose(distance_to_domain(dom, x), [1.0, 0.0], atol=1e-12)


def test_projection_failure():
    # the origin is a critical point of ||x||^2
    dom = G.Implicit(2, maps.sum_of_squares(2), 1.0, 1.0)
    with pytest.raises(ProjectionFailure):
        distance_to_domain(dom, [0.0, 0.0])


def test_mc_tube_volume_examples():
    v, se = mc_tube_volume(G.HalfSpace([1.0], 0.0), 0.0, 400_000, 0)
    assert abs(v - 0.5) <= 4 * se
    v, se = mc_tube_volume(G.HalfSpace([1.0], 1.0), 0.5, 400_000, 1)
    assert abs(v - stats.norm.sf(0.5)) <= 4 * se
    v, se = mc_tube_volume(G.BallComplement(3, 1.5), 0.2, 400_000, 2)
    assert abs(v - stats.chi.sf(1.3, 3)) <= 4 * se
    with pytest.raises(InvalidArgument):
        mc_tube_volume(G.HalfSpace([1.0], 0.0), -0.1, 10, 0)


def test_curve_is_monotone_and_reproducible():
    dom = G.BallComplement(2, 1.0)
    a = tube_curve(dom, RADII, 100_000, 7)
    b = tube_curve(dom, RADII, 100_000, 7)
    np.testing.assert_array_equal(a.volumes, b.volumes)
    assert np.all(np.diff(a.volumes) >= 0)


def test_curve_independent_of_threads_and_chunks():
    dom = G.HalfSpace([1.0, 0.0], 0.5)
    a = tube_curve(dom, RADII, 50_000, 3, chunk_size=7_000)
    b = tube_curve(dom, RADII, 50_000, 3, chunk_size=7_000, threads=2)
    np.testing.assert_array_equal(a.volumes, b.volumes)


def test_fit_exact_half_space():
    u = 1.0
    fit = fit_exact_curve(lambda r: mpmath.ncdf(r - u), np.linspace(0, 0.25, 20), 4)
    ref = G.gmf_half_space(u, 4).coeffs
    np.testing.assert_allclose(fit.coefficients, ref, rtol=1e-9, atol=1e-12)


def test_fit_double_precision_exact_curve():
    u = 0.5
    curve = TubeCurve.exact(np.linspace(0, 0.25, 20), lambda r: stats.norm.sf(u - r))
    fit = fit_tube_coefficients(curve, 3, guard=4)
    # round-off in double precision limits the third derivative to about 1e-5
    np.testing.assert_allclose(fit.coefficients, G.gmf_half_space(u, 3).coeffs, rtol=2e-5)


def test_constant_curve():
    curve = TubeCurve.exact(np.linspace(0, 0.25, 12), lambda r: 0.3)
    fit = fit_tube_coefficients(curve, 2)
    np.testing.assert_allclose(fit.coefficients, [0.3, 0.0, 0.0], atol=1e-12)


def test_fit_validation():
    curve = TubeCurve.exact(np.linspace(0, 0.5, 12), lambda r: 0.3)
    with pytest.raises(InvalidArgument):
        fit_tube_coefficients(curve, 2)
    with pytest.raises(InvalidArgument):
        fit_tube_coefficients(TubeCurve.exact(np.linspace(0, 0.25, 4), lambda r: r), 2)
    with pytest.raises(InvalidArgument):
        TubeCurve(np.array([0.0, 0.0]), np.zeros(2), np.ones(2))


def test_covariance_nested_events():
    c = TubeCurve(np.array([0.0, 0.1]), np.array([0.2, 0.5]), np.zeros(2), 100)
    np.testing.assert_allclose(c.covariance(), np.array([[0.16, 0.1], [0.1, 0.25]]) / 100)


def test_containment():
    dom = G.BallComplement(2, 1.0)
    c = tube_curve(dom, RADII, 200_000, 8)
    inside = tube_curve(dom, [0.0], 200_000, 8).volumes[0]
    assert np.all(c.volumes >= inside) and np.all(c.volumes <= 1.0)


def test_standard_errors_shrink_by_root_two():
    dom = G.HalfSpace([1.0], 0.5)
    ratios = []
    for seed in range(10):
        s1 = fit_tube_coefficients(tube_curve(dom, RADII, 100_000, seed), 2).std_errors
        s2 = fit_tube_coefficients(tube_curve(dom, RADII, 200_000, seed), 2).std_errors
        ratios.append(s1 / s2)
    np.testing.assert_allclose(np.mean(ratios, axis=0), math.sqrt(2), rtol=0.2)


@pytest.mark.parametrize("dom", [
    G.HalfSpace([1.0, 0.0], 0.5),
    G.BallComplement(2, 1.5),
    G.BallComplement(3, 2.0),
    G.NoncentralBallComplement(2, [1.0, 0.0], 1.8),
    G.NoncentralBallComplement(3, [0.0, 2.0, 0.0], 2.5),
    G.Cone2([1.0, 0.0], [0.0, 1.0], [0.5, -0.5]),
    G.conjunction_cone_params(1.0, 0.3),
], ids=["half-space", "chi2", "chi3", "noncentral2", "noncentral3", "quadrant", "conjunction"])
def test_oracle_agrees_with_closed_form(dom):
    radii = np.linspace(0, min(1.0, dom.critical_radius) / 4, 16)
    fit = fit_tube_coefficients(tube_curve(dom, radii, 2_000_000, 11), 3)
    z = fit.z_scores(G.gmf(dom, 3).coeffs)
    assert np.all(np.abs(z) < 3), z
