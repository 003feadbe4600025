import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from gkf_kit.errors import DomainError, InvalidArgument
from gkf_kit.numdiff import richardson
from gkf_kit.special_fn import (
    chi_density, chi_density_derivative, flag_coeff, gaussian_tail, hermite, hermite_at_zero,
    incomplete_beta, noncentral_chi_density, noncentral_chi_upper_tail, unit_ball_volume,
)


# hermite

def test_hermite_examples():
    assert hermite(0, 3.7) == 1.0
    assert hermite(2, 0.0) == -1.0
    assert hermite(3, 2.0) == 2.0


def test_hermite_matches_numpy_hermite_e():
    x = np.linspace(-3, 3, 13)
    for n in range(9):
        coef = np.zeros(n + 1)
        coef[n] = 1
        np.testing.assert_allclose(hermite(n, x), np.polynomial.hermite_e.hermeval(x, coef),
                                   rtol=1e-12, atol=1e-12)


def test_hermite_at_zero_matches_recurrence():
    for n in range(12):
        assert hermite_at_zero(n) == pytest.approx(hermite(n, 0.0), abs=1e-12)


@pytest.mark.parametrize("n", range(9))
@pytest.mark.parametrize("x", [-2.0, -1.0, 0.0, 1.0, 2.0])
def test_hermite_derivative_identity(n, x):
    # an order-8 difference with step 1e-3 needs ~30 digits, so the stencil runs in mpmath
    with mpmath.workdps(50):
        g = lambda t: mpmath.exp(-t * t / 2)
        fd = float(richardson(g, mpmath.mpf(x), mpmath.mpf("1e-3"), n, 2))
    assert fd == pytest.approx((-1) ** n * hermite(n, x) * math.exp(-x * x / 2), abs=1e-6)


def test_hermite_negative_degree():
    with pytest.raises(InvalidArgument):
        hermite(-1, 0.0)


# ball volumes and flag coefficients

def test_unit_ball_volume_examples():
    assert unit_ball_volume(0) == 1.0
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)


def test_unit_ball_volume_recursion():
    for k in range(1, 21):
        rhs = unit_ball_volume(k - 1) * math.sqrt(math.pi) * math.gamma((k + 1) / 2) / math.gamma(k / 2 + 1)
        assert unit_ball_volume(k) == pytest.approx(rhs, rel=1e-12)


def test_flag_coeff_examples_and_symmetry():
    assert flag_coeff(5, 0) == pytest.approx(1.0, rel=1e-15)
    assert flag_coeff(2, 1) == pytest.approx(math.pi / 2, rel=1e-15)
    assert flag_coeff(3, 1) == pytest.approx(2.0, rel=1e-15)
    for k in range(8):
        for i in range(k + 1):
            assert flag_coeff(k, i) == flag_coeff(k, k - i)
    with pytest.raises(InvalidArgument):
        flag_coeff(2, 3)


# incomplete beta

def test_incomplete_beta_examples():
    assert incomplete_beta(1, 1, 0.75) == pytest.approx(0.75, rel=1e-14)
    assert incomplete_beta(0.5, 0.5, 1.0) == pytest.approx(math.pi, rel=1e-13)
    assert incomplete_beta(2, 1, 0.5) == pytest.approx(0.125, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 5), st.floats(0.3, 5), st.floats(0.0, 1.0))
def test_incomplete_beta_matches_quadrature(a, b, x):
    with mpmath.workdps(30):
        ref = float(mpmath.quad(lambda t: t ** (a - 1) * (1 - t) ** (b - 1), [0, x / 2, x]))
    assert incomplete_beta(a, b, x) == pytest.approx(ref, rel=1e-7, abs=1e-10)


def test_incomplete_beta_range():
    with pytest.raises(InvalidArgument):
        incomplete_beta(1, 1, 1.5)
    with pytest.raises(InvalidArgument):
        incomplete_beta(0, 1, 0.5)


# chi densities

def test_chi_density_derivative_examples():
    for t in (0.3, 1.0, 2.5):
        assert chi_density_derivative(2, 1, t) == pytest.approx(t * math.exp(-t * t / 2), rel=1e-14)
        assert chi_density_derivative(2, 2, t) == pytest.approx((1 - t * t) * math.exp(-t * t / 2),
                                                                rel=1e-13, abs=1e-15)
    assert chi_density_derivative(3, 1, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.exp(-0.5),
                                                             rel=1e-14)


def test_chi_density_derivative_domain():
    with pytest.raises(DomainError):
        chi_density_derivative(2, 1, 0.0)


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("j", range(1, 6))
def test_chi_density_derivative_chain(k, j):
    ts = np.linspace(0.4, 3.5, 20)
    fd = [richardson(lambda t: chi_density_derivative(k, j, t), float(t), 1e-2, 1, 3) for t in ts]
    np.testing.assert_allclose(chi_density_derivative(k, j + 1, ts), fd, atol=1e-6)


@pytest.mark.parametrize("k", range(1, 7))
def test_chi_density_normalized(k):
    val, _ = integrate.quad(lambda t: chi_density(k, t), 0, 20, epsabs=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_chi_density_matches_scipy():
    t = np.linspace(0.1, 5, 30)
    for k in range(1, 8):
        from scipy import stats
        np.testing.assert_allclose(chi_density(k, t), stats.chi.pdf(t, k), rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 4.0])
def test_noncentral_density_normalized(alpha):
    val, _ = integrate.quad(lambda t: noncentral_chi_density(2, alpha, t), 0, 20 + 5 * math.sqrt(alpha),
                            epsabs=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_noncentral_density_alpha_zero_is_central():
    t = np.linspace(0.1, 4, 9)
    np.testing.assert_array_equal(noncentral_chi_density(3, 0.0, t), chi_density(3, t))


def test_noncentral_density_matches_scipy_ncx2():
    # density of ||Z + mu|| from the ncx2 density by change of variables
    from scipy import stats
    t = np.linspace(0.2, 4, 15)
    for k, alpha in [(1, 0.7), (2, 1.0), (3, 6.0)]:
        ref = 2 * t * stats.ncx2.pdf(t * t, k, alpha)
        np.testing.assert_allclose(noncentral_chi_density(k, alpha, t), ref, rtol=1e-9)


def test_noncentral_density_monte_carlo():
    rng = np.random.default_rng(7)
    n, h = 10_000_000, 1e-2
    z = rng.standard_normal((n, 2))
    z[:, 0] += 1.0
    r = np.hypot(z[:, 0], z[:, 1])
    hits = np.abs(r - 1.0) < h
    est = hits.mean() / (2 * h)
    se = hits.std() / math.sqrt(n) / (2 * h)
    assert abs(est - noncentral_chi_density(2, 1.0, 1.0)) <= 3 * se


def test_noncentral_series_metadata():
    val, info = noncentral_chi_density(2, 1.0, 1.0, 1e-12, full_output=True)
    assert info.n_terms >= 2
    assert info.tail_mass < 1e-14


def test_noncentral_tail_consistent_with_density():
    # -d/dx P(||Z + mu|| >= x) is the density
    for x in (0.5, 1.5, 2.5):
        fd = -richardson(lambda t: noncentral_chi_upper_tail(2, 1.0, t), x, 1e-2, 1, 3)
        assert fd == pytest.approx(noncentral_chi_density(2, 1.0, x), abs=1e-9)


def test_gaussian_tail_deep():
    assert gaussian_tail(10.0) == pytest.approx(special.erfc(10 / math.sqrt(2)) / 2, rel=1e-12)
