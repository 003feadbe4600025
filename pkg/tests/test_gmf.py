import math

import mpmath
import numpy as np
import pytest
from scipy import integrate, stats

from gkf_kit import gmf as G
from gkf_kit.errors import DegenerateCone, InvalidArgument, OrderOutOfRange
from gkf_kit.numdiff import richardson
from gkf_kit.special_fn import chi_density, gaussian_density, hermite, noncentral_chi_density


# half-space

def test_half_space_examples():
    s = G.gmf_half_space(0.0, 3)
    assert s[0] == 0.5
    assert s[2] == 0.0
    assert G.gmf_half_space(1.0, 1)[1] == pytest.approx(0.2419707245191434, rel=1e-14)


@pytest.mark.parametrize("u", [0.0, 1.0, 2.0])
def test_half_space_level_shift(u):
    for j in range(1, 6):
        fd = -richardson(lambda v: G.gmf_half_space(v, 6)[j], u, 1e-4, 1, 1)
        assert G.gmf_half_space(u, 6)[j + 1] == pytest.approx(fd, abs=1e-6)


def test_half_space_tube_is_shifted_half_space():
    # gamma(T(D, r)) = 1 - Phi(u - r), whose Taylor coefficients in r are M_j
    u = 0.7
    s = G.gmf_half_space(u, 6)
    with mpmath.workdps(30):
        for j in range(7):
            d = mpmath.diff(lambda r: mpmath.ncdf(r - u), 0, j)
            assert s[j] == pytest.approx(float(d), rel=1e-12, abs=1e-15)


# chi and noncentral chi

def test_chi_examples():
    for x in (0.5, 1.0, 2.0):
        assert G.gmf_chi(2, x, 1)[1] == pytest.approx(x * math.exp(-x * x / 2), rel=1e-14)
        assert G.gmf_chi(1, x, 1)[1] == pytest.approx(2 * gaussian_density(x), rel=1e-14)
    fd = -richardson(lambda t: chi_density(3, t), 1.5, 1e-2, 1, 3)
    assert G.gmf_chi(3, 1.5, 2)[2] == pytest.approx(fd, abs=1e-9)


def test_chi_m0_is_tail():
    for k in (1, 2, 5):
        assert G.gmf_chi(k, 1.3, 0)[0] == pytest.approx(stats.chi.sf(1.3, k), rel=1e-13)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_chi_radius_shift(k):
    x = 1.7
    for j in range(0, 4):
        fd = -richardson(lambda t: G.gmf_chi(k, t, 5)[j], x, 1e-3, 1, 2)
        assert G.gmf_chi(k, x, 5)[j + 1] == pytest.approx(fd, abs=1e-5)


def test_noncentral_alpha_zero_is_central():
    np.testing.assert_allclose(G.gmf_noncentral_chi(3, 0.0, 1.5, 4).coeffs,
                               G.gmf_chi(3, 1.5, 4).coeffs, rtol=1e-14)


def test_noncentral_examples():
    s = G.gmf_noncentral_chi(2, 1.0, 2.0, 2)
    assert s[1] == pytest.approx(noncentral_chi_density(2, 1.0, 2.0), rel=1e-12)
    fd = -richardson(lambda t: noncentral_chi_density(2, 1.0, t), 2.0, 1e-3, 1, 2)
    assert s[2] == pytest.approx(fd, abs=1e-5)


def test_noncentral_radius_shift():
    x = 2.0
    for j in range(0, 3):
        fd = -richardson(lambda t: G.gmf_noncentral_chi(3, 2.0, t, 4)[j], x, 1e-3, 1, 2)
        assert G.gmf_noncentral_chi(3, 2.0, x, 4)[j + 1] == pytest.approx(fd, abs=1e-5)


# F field

def test_f_field_first_order_closed_form():
    for k1, k2, u in [(2, 2, 1.0), (3, 5, 0.7), (1, 4, 2.0)]:
        g = k1 * u / k2
        ref = (math.gamma((k1 + k2 - 1) / 2) / (2 ** -0.5 * math.gamma(k1 / 2) * math.gamma(k2 / 2))
               * g ** ((k1 - 1) / 2) * (1 + g) ** (-(k1 + k2 - 2) / 2))
        assert G.gmf_f_field(k1, k2, u, 1)[1] == pytest.approx(ref, rel=1e-12)


def test_f_field_tail():
    assert G.gmf_f_field(3, 7, 1.4, 0)[0] == pytest.approx(stats.f.sf(1.4, 3, 7), rel=1e-12)


@pytest.mark.parametrize("k1,k2", [(2, 2), (3, 4), (5, 3), (1, 6)])
def test_f_field_two_closed_forms_agree(k1, k2):
    for u in (0.5, 1.0, 2.5):
        J = min(4, k1 + k2 - 1)
        np.testing.assert_allclose(G.gmf_f_field(k1, k2, u, J).coeffs,
                                   G.gmf_f_field_surface(k1, k2, u, J).coeffs,
                                   rtol=1e-10, atol=1e-12)


def test_f_field_m1_by_surface_quadrature():
    # M_1 is the Gaussian surface mass of {F = u}: in polar blocks, U = a^2, V = b^2
    k1 = k2 = 2
    u = 1.0
    # F = U/V = u on the cone a = sqrt(u) b; the surface mass is
    # int phi dH = E[||grad F|| delta(F - u)] -> compare with the coarea estimate instead
    est = G.gmf_m1_m2_coarea(G.FRegion(k1, k2, u), 0.01, 2_000_000, 5)
    ref = G.gmf_f_field(k1, k2, u, 2)
    assert abs(est.M1 - ref[1]) <= 3 * est.M1_se
    assert abs(est.M2 - ref[2]) <= 3 * est.M2_se


def test_f_field_gamma_pole():
    with pytest.raises(OrderOutOfRange):
        G.gmf_f_field(1, 1, 1.0, 2)


def test_f_region_rejects_nonpositive_level():
    with pytest.raises(InvalidArgument):
        G.gmf_f_field(2, 2, 0.0, 1)


# cones

def test_K_examples():
    for th in (0.3, 1.2, 2.5):
        assert G.K_jl(2, 0, th) == pytest.approx(math.pi - th, rel=1e-12)
    assert G.K_jl(3, 1, math.pi / 2) == pytest.approx(2.0, rel=1e-12)
    assert G.K_jl(3, 0, math.pi / 2) == pytest.approx(2.0, rel=1e-12)


def test_K_printed_branches_diagnostic():
    # the sin^2 reading of the branch formulas matches the integral; the printed one does not
    for j, l, th in [(4, 1, 1.0), (5, 2, 2.0), (4, 0, 0.7)]:
        assert G.K_jl_branches(j, l, th, "sin2") == pytest.approx(G.K_jl(j, l, th), rel=1e-8)
        assert abs(G.K_jl_branches(j, l, th, "printed") - G.K_jl(j, l, th)) > 1e-6


def test_quadrant_at_origin():
    cone = G.Cone2([1.0, 0.0], [0.0, 1.0], [0.0, 0.0])
    s = G.gmf_cone2(cone, 2)
    assert s[0] == pytest.approx(0.25, abs=1e-10)
    assert s[1] == pytest.approx(2 * 0.5 * gaussian_density(0.0), rel=1e-10)


@pytest.mark.parametrize("theta", [0.4, 1.3, 2.2, 3.0])
def test_sector_measure_is_angle(theta):
    cone = G.Cone2([1.0, 0.0], [math.cos(theta), math.sin(theta)], [0.0, 0.0])
    assert G.gmf_cone2(cone, 0)[0] == pytest.approx(theta / (2 * math.pi), abs=1e-10)


def test_cone_measure_by_dblquad():
    cone = G.conjunction_cone_params(0.8, 0.3)
    phi2 = lambda y, x: math.exp(-(x * x + y * y) / 2) / (2 * math.pi) * bool(cone.contains([x, y]))
    # the cone is {z1 >= u, z2 >= u}; integrate in the original (y1, y2) coordinates
    rho, u = 0.3, 0.8
    s = math.sqrt(1 - rho * rho)
    ref, _ = integrate.quad(lambda y1: gaussian_density(y1) * stats.norm.sf((u - rho * y1) / s), u, 12,
                            epsabs=1e-13)
    assert G.gmf_cone2(cone, 0)[0] == pytest.approx(ref, abs=1e-9)


def test_cone_m0_vanishes_as_cone_closes():
    vals = []
    for eps in (0.3, 0.1, 0.01, 1e-4):
        cone = G.Cone2([1.0, 0.0], [math.cos(eps), math.sin(eps)], [0.5, 0.0])
        vals.append(G.gmf_cone2(cone, 0)[0])
    assert vals[0] > vals[1] > vals[2] > vals[3]
    assert vals[3] < 1e-4


def test_cone_opens_to_half_plane():
    # as the edges become antiparallel the cone tends to {y2 >= 0.3}
    ref = stats.norm.sf(0.3)
    errs = []
    for eps in (0.1, 0.01, 1e-4):
        th = math.pi - eps
        cone = G.Cone2([1.0, 0.0], [math.cos(th), math.sin(th)], [0.0, 0.3])
        errs.append(abs(G.gmf_cone2(cone, 0)[0] - ref))
    assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-4


@pytest.mark.parametrize("dist", [1.0, 2.5])
def test_cone_far_apex_against_tube_oracle(dist):
    from gkf_kit.tube_oracle import fit_tube_coefficients, tube_curve
    th = 1.2
    v1 = np.array([1.0, 0.0])
    v2 = np.array([math.cos(th), math.sin(th)])
    bis = (v1 + v2) / np.linalg.norm(v1 + v2)
    cone = G.Cone2(v1, v2, -dist * bis)
    fit = fit_tube_coefficients(tube_curve(cone, np.linspace(0, 0.25, 16), 1_000_000, 4), 2)
    assert np.all(np.abs(fit.z_scores(G.gmf_cone2(cone, 2).coeffs)) < 3)


def test_conjunction_apex():
    for u, rho in [(1.0, 0.0), (2.0, 0.5), (-1.0, -0.7), (0.3, 0.9)]:
        cone = G.conjunction_cone_params(u, rho)
        assert cone.v1_perp @ cone.apex == pytest.approx(u, abs=1e-12)
        assert cone.v2_perp @ cone.apex == pytest.approx(u, abs=1e-12)
    cone = G.conjunction_cone_params(1.5, 0.0)
    np.testing.assert_allclose(cone.apex, [1.5, 1.5])
    assert cone.theta == pytest.approx(math.pi / 2)
    np.testing.assert_allclose(G.conjunction_cone_params(1.5, 0.0, "printed").apex, cone.apex)
    with pytest.raises(InvalidArgument):
        G.conjunction_cone_params(1.0, 1.0)


def test_degenerate_cone():
    with pytest.raises(DegenerateCone):
        G.Cone2([1.0, 0.0], [-1.0, 0.0], [0.0, 0.0])


def test_conjunction_m0_is_joint_tail():
    for u, rho in [(1.0, 0.5), (2.0, -0.5), (0.5, 0.0)]:
        ref = stats.multivariate_normal([0, 0], [[1, rho], [rho, 1]]).cdf([-u, -u])
        assert G.gmf_conjunction(u, rho, 0)[0] == pytest.approx(ref, abs=1e-7)


# boundary integrals

@pytest.mark.parametrize("u", [0.0, 1.0, -0.5])
def test_boundary_integral_hyperplane(u):
    b = G.hyperplane_boundary([0.6, 0.8], u)
    np.testing.assert_allclose(G.gmf_boundary_integral(b, 4).coeffs[1:],
                               G.gmf_half_space(u, 4).coeffs[1:], atol=1e-6)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_boundary_integral_circle(x):
    b = G.circle_boundary(x)
    np.testing.assert_allclose(G.gmf_boundary_integral(b, 5).coeffs[1:],
                               G.gmf_chi(2, x, 5).coeffs[1:], atol=1e-6)


def test_boundary_integral_empty_boundary():
    b = G.BoundaryData(2, np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2)))
    assert np.all(G.gmf_boundary_integral(b, 3).coeffs[1:] == 0)


# coarea

def test_coarea_half_space():
    for u in (0.0, 1.0):
        est = G.gmf_m1_m2_coarea(G.HalfSpace(np.array([1.0, 0.0]), u), 0.01, 2_000_000, 1)
        assert abs(est.M1 - gaussian_density(u)) <= 3 * est.M1_se + 1e-4
        assert abs(est.M2 - u * gaussian_density(u)) <= 3 * est.M2_se + 1e-4


def test_coarea_ball_complement():
    est = G.gmf_m1_m2_coarea(G.BallComplement(2, 2.0), 0.02, 2_000_000, 2)
    ref = G.gmf_chi(2, 2.0, 2)
    assert abs(est.M1 - ref[1]) <= 3 * est.M1_se + 1e-4
    assert abs(est.M2 - ref[2]) <= 3 * est.M2_se + 1e-4


def test_chi2_and_chi_presentations_share_domain():
    from gkf_kit.gkf import family_domain, family_gmf
    assert family_domain("chi2", 4.0, k=3) == family_domain("chi", 2.0, k=3)
    np.testing.assert_array_equal(family_gmf("chi2", 4.0, 3, k=3).coeffs,
                                  family_gmf("chi", 2.0, 3, k=3).coeffs)


def test_series_tube_volume():
    s = G.gmf_half_space(1.0, 8)
    assert s.tube_volume(0.1) == pytest.approx(stats.norm.sf(0.9), rel=1e-9)
