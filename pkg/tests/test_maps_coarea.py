import math

import numpy as np
import pytest

from gkf_kit import maps
from gkf_kit.coarea import coarea_mc, default_epsilon, gradient_norm, window_estimates
from gkf_kit.errors import InvalidArgument, WindowTooNarrow
from gkf_kit.special_fn import gaussian_density


def fd_grad(F, x, h=1e-6):
    out = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (F(x + e) - F(x - e)) / (2 * h)
    return out


def fd_hess(F, x, h=1e-3):
    # one Richardson step on central differences of the gradient
    k = x.size
    out = np.zeros((k, k))
    for i in range(k):
        e = np.zeros(k)
        e[i] = 1.0
        d1 = (F.grad(x + h * e) - F.grad(x - h * e)) / (2 * h)
        d2 = (F.grad(x + h / 2 * e) - F.grad(x - h / 2 * e)) / h
        out[:, i] = (4 * d2 - d1) / 3
    return out


SMOOTH = [maps.linear([0.6, 0.8]), maps.identity(), maps.sum_of_squares(3),
          maps.shifted_sum_of_squares([1.0, -0.5]), maps.euclidean_norm(3),
          maps.f_ratio(2, 2), maps.f_ratio(1, 3), maps.f_ratio(3, 2)]


@pytest.mark.parametrize("F", SMOOTH, ids=lambda F: F.name + str(F.k))
def test_derivatives_match_finite_differences(F):
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.normal(size=F.k) + 0.3
        np.testing.assert_allclose(F.grad(x), fd_grad(F, x), rtol=1e-6, atol=1e-7)
        np.testing.assert_allclose(F.hess(x), fd_hess(F, x), rtol=1e-6, atol=1e-6)


def test_maps_act_on_last_axis():
    F = maps.sum_of_squares(2)
    grid = np.ones((4, 5, 2))
    assert F(grid).shape == (4, 5)
    with pytest.raises(InvalidArgument):
        F(np.ones((3, 3)))


def test_conjunction_is_min_of_correlated_pair():
    F = maps.conjunction(0.5)
    x = np.array([[1.0, 0.0], [0.0, 2.0]])
    s = math.sqrt(0.75)
    np.testing.assert_allclose(F(x), [min(1.0, 0.5), min(0.0, 2 * s)])
    assert not F.smooth


def test_coarea_linear_gives_gaussian_density():
    for u in (0.0, 1.0):
        est, se = coarea_mc(maps.linear([0.6, 0.8]), u, None, 0.01, 2_000_000, 1)
        assert abs(est - gaussian_density(u)) <= 3 * se + 1e-4


def test_coarea_chi_squared_shell():
    # int over ||x||^2 = 4 of phi dH = 2 pi * 2 * e^{-2} / (2 pi) = f_2(2)
    F = maps.sum_of_squares(2)
    est, se = coarea_mc(F, 4.0, None, 0.02, 2_000_000, 2)
    assert abs(est - 2 * math.exp(-2)) <= 3 * se + 1e-4
    # with weight 1/||grad F||, the chi-squared density at 4
    est, se = coarea_mc(F, 4.0, lambda x, f, g, h: 1 / np.linalg.norm(g, axis=-1),
                        0.02, 2_000_000, 2)
    assert abs(est - math.exp(-2) / 2) <= 3 * se + 1e-4


def test_coarea_zero_weight():
    est, se = coarea_mc(maps.identity(), 0.0, lambda x, f, g, h: np.zeros(len(x)), 0.01, 10_000, 0)
    assert est == 0.0 and se == 0.0


def test_richardson_window_reduces_bias():
    # for ||x|| in R^2 at radius 2, the plain window bias is visible at eps = 0.2
    F = maps.euclidean_norm(2)
    exact = 2 * math.exp(-2)
    plain = window_estimates(F, 2.0, [gradient_norm], 0.2, 4_000_000, 3)[0]
    rich = window_estimates(F, 2.0, [gradient_norm], 0.2, 4_000_000, 3, richardson=True)[0]
    assert abs(plain[0] - exact) > 5 * plain[1]
    assert abs(rich[0] - exact) <= 3 * rich[1]


def test_empty_window():
    with pytest.raises(WindowTooNarrow):
        coarea_mc(maps.identity(), 50.0, None, 1e-3, 1000, 0)


def test_default_epsilon():
    assert default_epsilon(0.2) == 0.01
    assert default_epsilon(-4.0) == pytest.approx(0.04)
