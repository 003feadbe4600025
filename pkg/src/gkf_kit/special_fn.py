"""Special functions used throughout the package.

Hermite polynomials follow the *probabilists'* convention,

    d^n/dx^n exp(-x^2/2) = (-1)^n He_n(x) exp(-x^2/2),

so that ``hermite(2, x) == x**2 - 1``.  The physicists' polynomials differ by
a rescaling of both the argument and the value; do not mix the two.

Densities of the chi distribution (the square root of a chi-squared variable)
are written ``f_k``; the noncentral version with noncentrality ``alpha`` is a
Poisson mixture of central ones.  Arguments beyond ``|x| > 40`` underflow to 0
in the Gaussian factors; no asymptotic expansions are attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import DomainError, InvalidArgument, SeriesError

SQRT_2PI = math.sqrt(2.0 * math.pi)

#: Hard cap on the number of Poisson terms summed by the noncentral series.
MAX_SERIES_TERMS = 10_000


def hermite(n, x):
    """Probabilists' Hermite polynomial He_n(x).

    Evaluated with the recurrence ``He_{n+1} = x He_n - n He_{n-1}``.
    Accepts scalars or arrays for ``x``.
    """
    if n < 0:
        raise InvalidArgument(f"Hermite degree must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for m in range(1, n):
        prev, cur = cur, x * cur - m * prev
    return cur if cur.ndim else float(cur)


def hermite_at_zero(n: int) -> float:
    """He_n(0): zero for odd n, (-1)^l (2l)!/(l! 2^l) for n = 2l."""
    if n % 2:
        return 0.0
    l = n // 2
    return (-1) ** l * math.factorial(n) / (math.factorial(l) * 2**l)


def gaussian_density(x):
    return np.exp(-0.5 * np.square(x)) / SQRT_2PI


def gaussian_tail(x):
    """Upper tail 1 - Phi(x), accurate far into the tail."""
    return special.ndtr(-np.asarray(x, dtype=float))


def unit_ball_volume(k: int) -> float:
    """Volume omega_k = pi^{k/2} / Gamma(k/2 + 1) of the unit ball in R^k."""
    if k < 0:
        raise InvalidArgument(f"dimension must be >= 0, got {k}")
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def flag_coeff(k: int, i: int) -> float:
    """Flag coefficient C(k, i) * omega_k / (omega_i * omega_{k-i})."""
    if not 0 <= i <= k:
        raise InvalidArgument(f"flag coefficient needs 0 <= i <= k, got k={k}, i={i}")
    return math.comb(k, i) * unit_ball_volume(k) / (
        unit_ball_volume(i) * unit_ball_volume(k - i))


def incomplete_beta(nu1: float, nu2: float, x: float) -> float:
    """Unnormalized incomplete beta integral of t^{nu1-1} (1-t)^{nu2-1} over [0, x]."""
    if nu1 <= 0 or nu2 <= 0:
        raise InvalidArgument("beta parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise InvalidArgument(f"incomplete beta argument must lie in [0, 1], got {x}")
    return float(special.betainc(nu1, nu2, x) * special.beta(nu1, nu2))


def _chi_log_norm(k: int) -> float:
    # log of Gamma(k/2) 2^{(k-2)/2}
    return math.lgamma(k / 2) + (k - 2) / 2 * math.log(2.0)


def chi_density(k: int, t):
    """Density f_k of the chi distribution with k degrees of freedom."""
    if k < 1:
        raise InvalidArgument("degrees of freedom must be >= 1")
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        logf = (k - 1) * np.log(np.where(t > 0, t, 1.0)) - 0.5 * t * t - _chi_log_norm(k)
    out = np.where(t > 0, np.exp(logf), 0.0)
    return out if out.ndim else float(out)


def chi_bracket(k: int, j: int, t):
    """Polynomial factor of the (j-1)-th derivative of f_k.

    Returns the double sum over l, m with weights
    (-1)^{m+l} (j-1)! / (m! l! 2^l) C(k-1, j-1-m-2l) t^{2m+2l}.
    """
    t = np.asarray(t, dtype=float)
    t2 = t * t
    total = np.zeros_like(t)
    fj = math.factorial(j - 1)
    for l in range((j - 1) // 2 + 1):
        for m in range(j - 2 * l):
            b = j - 1 - m - 2 * l
            if k < j - m - 2 * l:
                continue
            coef = (-1) ** (m + l) * fj / (math.factorial(m) * math.factorial(l) * 2**l)
            total = total + coef * math.comb(k - 1, b) * t2 ** (m + l)
    return total


def chi_density_derivative(k: int, j: int, t):
    """(j-1)-th derivative of the chi density f_k, evaluated at t > 0."""
    if k < 1 or j < 1:
        raise InvalidArgument("need k >= 1 and j >= 1")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("chi density derivatives are defined for t > 0 only")
    pref = np.exp((k - j) * np.log(t) - 0.5 * t * t - _chi_log_norm(k))
    out = pref * chi_bracket(k, j, t)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SeriesInfo:
    """Truncation record of a Poisson-mixture series."""

    n_terms: int
    tail_mass: float


def poisson_mixture_weights(alpha: float, tol: float) -> tuple[np.ndarray, SeriesInfo]:
    """Weights e^{-alpha/2} (alpha/2)^i / i! truncated once the tail is negligible.

    Summation stops when the remaining Poisson mass falls below ``tol * 1e-2``.
    The 1e-2 margin absorbs the supremum of the mixed densities, which is not
    bounded by 1 uniformly in the degrees of freedom.
    """
    if alpha < 0:
        raise InvalidArgument("noncentrality must be >= 0")
    if tol <= 0:
        raise InvalidArgument("tol must be positive")
    if alpha == 0:
        return np.ones(1), SeriesInfo(1, 0.0)
    lam = alpha / 2
    threshold = tol * 1e-2
    n = int(stats.poisson.isf(threshold, lam)) + 1
    n = max(n, 1)
    while n <= MAX_SERIES_TERMS and stats.poisson.sf(n - 1, lam) >= threshold:
        n += 1
    if n > MAX_SERIES_TERMS:
        raise SeriesError(f"Poisson mixture needs more than {MAX_SERIES_TERMS} terms (alpha={alpha})")
    i = np.arange(n)
    weights = stats.poisson.pmf(i, lam)
    return weights, SeriesInfo(n, float(stats.poisson.sf(n - 1, lam)))


def noncentral_chi_density(k: int, alpha: float, t, tol: float = 1e-12, full_output: bool = False):
    """Density of the norm of a k-variate Gaussian with mean of squared norm ``alpha``.

    f_{alpha,k}(t) = sum_i e^{-alpha/2} (alpha/2)^i / i! f_{k+2i}(t).

    With ``full_output=True`` a ``SeriesInfo`` is returned alongside the value.
    """
    weights, info = poisson_mixture_weights(alpha, tol)
    t = np.asarray(t, dtype=float)
    value = np.zeros_like(t)
    for i, w in enumerate(weights):
        value = value + w * chi_density(k + 2 * i, t)
    value = value if value.ndim else float(value)
    if full_output:
        return value, info
    return value


def chi_upper_tail(k: int, x):
    """P(||Z|| >= x) for Z standard Gaussian in R^k."""
    return stats.chi2.sf(np.square(x), k)


def noncentral_chi_upper_tail(k: int, alpha: float, x):
    if alpha == 0:
        return chi_upper_tail(k, x)
    return stats.ncx2.sf(np.square(x), k, alpha)
