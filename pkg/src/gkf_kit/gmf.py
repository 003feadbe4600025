"""Gaussian Minkowski functionals of the domain catalog.

For a domain D in R^k the Gaussian volume of its tube expands as

    gamma(T(D, r)) = M_0 + sum_{j >= 1} r^j / j! * M_j,

and ``GmfSeries.coeffs[j]`` always holds M_j in this r^j / j! convention.
The factor (2 pi)^{-j/2} relating M_j to EC densities is applied in
:mod:`gkf_kit.gkf` only.

Catalog domains
---------------
HalfSpace                 {x : <x, z> >= u}
BallComplement            {x : ||x|| >= radius}
NoncentralBallComplement  {x : ||x - mu|| >= radius}
FRegion                   {F_{k1,k2} >= u}
Cone2                     w + {a1 v1 + a2 v2 : a1, a2 >= 0} in R^2
Implicit                  {F >= u} for a user supplied smooth map
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from . import maps
from .coarea import default_epsilon, gradient_norm, mean_curvature_integrand, window_estimates
from .errors import (DegenerateCone, IncompleteBoundaryData, InvalidArgument,
                     OrderOutOfRange)
from .special_fn import (SQRT_2PI, SeriesInfo, chi_density_derivative, chi_upper_tail,
                         gaussian_density, gaussian_tail, hermite, incomplete_beta,
                         noncentral_chi_upper_tail, poisson_mixture_weights)

_UNIT_TOL = 1e-12


def _unit(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise InvalidArgument(f"{name} must be a vector")
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise InvalidArgument(f"{name} must be a unit vector (norm {np.linalg.norm(v)!r})")
    return v


# --------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class HalfSpace:
    direction: np.ndarray
    level: float

    def __post_init__(self):
        object.__setattr__(self, "direction", _unit(self.direction, "direction"))

    @property
    def k(self) -> int:
        return self.direction.size

    @property
    def critical_radius(self) -> float:
        return math.inf


@dataclass(frozen=True)
class BallComplement:
    k: int
    radius: float

    def __post_init__(self):
        if self.k < 1:
            raise InvalidArgument("dimension must be >= 1")
        if not self.radius > 0:
            raise InvalidArgument("radius must be positive")

    @property
    def critical_radius(self) -> float:
        return float(self.radius)


@dataclass(frozen=True)
class NoncentralBallComplement:
    k: int
    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        if center.shape != (self.k,):
            raise InvalidArgument(f"center must have length {self.k}")
        if not self.radius > 0:
            raise InvalidArgument("radius must be positive")
        object.__setattr__(self, "center", center)

    @property
    def alpha(self) -> float:
        return float(self.center @ self.center)

    @property
    def critical_radius(self) -> float:
        return float(self.radius)


@dataclass(frozen=True)
class FRegion:
    k1: int
    k2: int
    level: float

    def __post_init__(self):
        if self.k1 < 1 or self.k2 < 1:
            raise InvalidArgument("F degrees of freedom must be >= 1")
        if not self.level > 0:
            raise InvalidArgument("F-region levels must be positive")

    @property
    def k(self) -> int:
        return self.k1 + self.k2

    @property
    def critical_radius(self) -> float:
        # the boundary is a cone with apex at the origin
        return 0.0

    def as_implicit(self) -> Implicit:
        return Implicit(self.k, maps.f_ratio(self.k1, self.k2), self.level, 0.0)


@dataclass(frozen=True)
class Cone2:
    """Planar cone w + {a1 v1 + a2 v2 : a1, a2 >= 0}."""

    v1: np.ndarray
    v2: np.ndarray
    apex: np.ndarray

    def __post_init__(self):
        v1 = _unit(self.v1, "v1")
        v2 = _unit(self.v2, "v2")
        apex = np.asarray(self.apex, dtype=float)
        if v1.shape != (2,) or v2.shape != (2,) or apex.shape != (2,):
            raise InvalidArgument("Cone2 lives in R^2")
        if abs(v1[0] * v2[1] - v1[1] * v2[0]) < 1e-12:
            raise DegenerateCone("cone edges v1 and v2 are collinear")
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)
        object.__setattr__(self, "apex", apex)

    k = 2

    @property
    def theta(self) -> float:
        return float(np.arccos(np.clip(self.v1 @ self.v2, -1.0, 1.0)))

    @staticmethod
    def _inward_perp(v, other) -> np.ndarray:
        p = np.array([-v[1], v[0]])
        return p if p @ other > 0 else -p

    @property
    def v1_perp(self) -> np.ndarray:
        """Unit normal to v1 pointing into the cone, <v1_perp, v2> > 0."""
        return self._inward_perp(self.v1, self.v2)

    @property
    def v2_perp(self) -> np.ndarray:
        return self._inward_perp(self.v2, self.v1)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float) - self.apex
        return (x @ self.v1_perp >= 0) & (x @ self.v2_perp >= 0)

    @property
    def critical_radius(self) -> float:
        return math.inf


@dataclass(frozen=True)
class Implicit:
    """Excursion set {F >= level} of a smooth map."""

    k: int
    F: maps.SmoothMap
    level: float
    critical_radius_hint: float

    def __post_init__(self):
        if self.F.k != self.k:
            raise InvalidArgument("map dimension does not match k")

    @property
    def critical_radius(self) -> float:
        return float(self.critical_radius_hint)


Domain = HalfSpace | BallComplement | NoncentralBallComplement | FRegion | Cone2 | Implicit


# --------------------------------------------------------------------------
# series container


@dataclass(frozen=True)
class GmfSeries:
    """Gaussian Minkowski functionals M_0..M_J (coefficients of r^j / j!)."""

    coeffs: np.ndarray
    info: SeriesInfo | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise InvalidArgument("coefficients must be a non-empty vector")
        if not np.all(np.isfinite(c)):
            raise InvalidArgument("Minkowski functionals must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def J(self) -> int:
        return self.coeffs.size - 1

    def __getitem__(self, j: int) -> float:
        return float(self.coeffs[j])

    def __len__(self) -> int:
        return self.coeffs.size

    def tube_volume(self, r: float) -> float:
        """Truncated series gamma(D) + sum_j r^j / j! M_j."""
        j = np.arange(self.coeffs.size)
        return float(np.sum(self.coeffs * np.power(r, j) / special.factorial(j)))


def _check_order(J: int):
    if J < 0:
        raise InvalidArgument("order J must be >= 0")


# --------------------------------------------------------------------------
# closed forms


def gmf_half_space(u: float, J: int) -> GmfSeries:
    """M_0 = 1 - Phi(u), M_j = H_{j-1}(u) phi(u) for j >= 1."""
    _check_order(J)
    coeffs = [float(gaussian_tail(u))]
    coeffs += [hermite(j - 1, u) * float(gaussian_density(u)) for j in range(1, J + 1)]
    return GmfSeries(np.array(coeffs))


def _chi_terms(k: int, x: float, J: int) -> np.ndarray:
    # M_j = (-1)^{j-1} d^{j-1} f_k / dt^{j-1} at x, j = 1..J
    return np.array([(-1) ** (j - 1) * chi_density_derivative(k, j, x) for j in range(1, J + 1)])


def gmf_chi(k: int, x: float, J: int) -> GmfSeries:
    """Functionals of the ball complement {||z|| >= x} in R^k.

    The tube of radius r is the ball complement of radius x - r, so M_j is
    (-1)^{j-1} times the (j-1)-th derivative of the chi density f_k at x.
    Callers holding a chi-squared level u pass x = sqrt(u).
    """
    _check_order(J)
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    if not x > 0:
        raise InvalidArgument("radius x must be positive")
    m0 = float(chi_upper_tail(k, x))
    return GmfSeries(np.concatenate([[m0], _chi_terms(k, x, J)]))


def gmf_noncentral_chi(k: int, alpha: float, x: float, J: int, tol: float = 1e-12) -> GmfSeries:
    """Functionals of {||z - mu|| >= x} with alpha = ||mu||^2 (Poisson mixture of gmf_chi)."""
    _check_order(J)
    if not x > 0:
        raise InvalidArgument("radius x must be positive")
    weights, info = poisson_mixture_weights(alpha, tol)
    terms = np.zeros(J)
    for i, w in enumerate(weights):
        if J:
            terms += w * _chi_terms(k + 2 * i, x, J)
    m0 = float(noncentral_chi_upper_tail(k, alpha, x))
    return GmfSeries(np.concatenate([[m0], terms]), info=info)


def f_tail(k1: int, k2: int, u: float) -> float:
    """P(F_{k1,k2} >= u) from the regularized incomplete beta function."""
    x = k1 * u / (k1 * u + k2)
    return float(special.betaincc(k1 / 2, k2 / 2, x))


def _f_pole_check(k1: int, k2: int, j: int):
    a = (k1 + k2 - j) / 2
    if a <= 0 and float(a).is_integer():
        raise OrderOutOfRange(
            f"order j={j} hits a Gamma pole for F_{{{k1},{k2}}}; need j < {k1 + k2}")


def gmf_f_field(k1: int, k2: int, u: float, J: int) -> GmfSeries:
    """Functionals of {F_{k1,k2} >= u}, the F-field EC densities scaled by (2 pi)^{j/2}."""
    _check_order(J)
    if not u > 0:
        raise InvalidArgument("F levels must be positive")
    g = k1 * u / k2
    kk = k1 + k2
    coeffs = [f_tail(k1, k2, u)]
    for j in range(1, J + 1):
        _f_pole_check(k1, k2, j)
        a = (kk - j) / 2
        log_pref = (special.gammaln(a) - (j - 2) / 2 * math.log(2) - special.gammaln(k1 / 2)
                    - special.gammaln(k2 / 2) + (k1 - j) / 2 * math.log(g)
                    - (kk - 2) / 2 * math.log1p(g))
        sign_a = special.gammasgn(a)
        total = 0.0
        for l in range((j - 1) // 2 + 1):
            ratio = special.poch(a, l) / math.factorial(l)
            inner = 0.0
            for i in range(j - 2 * l):
                inner += ((-1) ** (i + l) * g ** (i + l) * _binom(k1 - 1, j - 1 - 2 * l - i)
                          * _binom(k2 - 1, i))
            total += ratio * inner
        coeffs.append(sign_a * math.exp(log_pref) * (-1) ** (j - 1)
                      * math.factorial(j - 1) * total)
    return GmfSeries(np.array(coeffs))


def _binom(n: int, r: int) -> int:
    return math.comb(n, r) if 0 <= r <= n else 0


def f_surface_integral(k1: int, k2: int, u: float, m: int) -> float:
    """(2 pi)^{-k/2} int_{F = u} Tr(S^m)/m! e^{-||x||^2/2} dH_{k-1}, in closed form.

    Here Tr(S^m)/m! is the m-th elementary symmetric function of the
    principal curvatures of the level set, which on {F = u} are
    -1 (k1 - 1 times), G (k2 - 1 times) and 0, scaled by 1/sqrt(V G (1 + G)).
    """
    kk = k1 + k2
    if not 0 <= m <= kk - 1:
        raise OrderOutOfRange(f"curvature order must lie in 0..{kk - 1}")
    a = (kk - m - 1) / 2
    if a <= 0 and float(a).is_integer():
        raise OrderOutOfRange(f"curvature order m={m} hits a Gamma pole")
    g = k1 * u / k2
    log_pref = (special.gammaln(a) - (m - 1) / 2 * math.log(2) - special.gammaln(k1 / 2)
                - special.gammaln(k2 / 2) + (k1 - 1 - m) / 2 * math.log(g)
                - (kk - 2) / 2 * math.log1p(g))
    poly = sum((-1) ** (m - i) * g**i * _binom(k1 - 1, m - i) * _binom(k2 - 1, i)
               for i in range(m + 1))
    return float(special.gammasgn(a) * math.exp(log_pref) * poly)


def gmf_f_field_surface(k1: int, k2: int, u: float, J: int) -> GmfSeries:
    """F-region functionals assembled from the curvature surface integrals.

    M_j = (j-1)! sum_l (-1)^l / (l! 2^l) I_{j-2l-1}, an independent route to
    :func:`gmf_f_field` that uses H_n(0) because <grad F(y), y> = 0.
    """
    _check_order(J)
    coeffs = [f_tail(k1, k2, u)]
    for j in range(1, J + 1):
        total = 0.0
        for l in range((j - 1) // 2 + 1):
            total += (-1) ** l / (math.factorial(l) * 2**l) * f_surface_integral(k1, k2, u, j - 2 * l - 1)
        coeffs.append(math.factorial(j - 1) * total)
    return GmfSeries(np.array(coeffs))


# --------------------------------------------------------------------------
# planar cones


def K_jl(j: int, l: int, theta: float, rtol: float = 1e-10) -> float:
    """(j - 1) * int_0^{pi - theta} sin^{j-2-l} t cos^l t dt by adaptive quadrature."""
    if j < 2 or not 0 <= l <= j - 2:
        raise InvalidArgument("K_jl needs j >= 2 and 0 <= l <= j - 2")
    if not 0 < theta < math.pi:
        raise InvalidArgument("theta must lie in (0, pi)")
    a, b = j - 2 - l, l
    val, _ = integrate.quad(lambda t: np.sin(t) ** a * np.cos(t) ** b, 0.0, math.pi - theta,
                            epsabs=0.0, epsrel=rtol, limit=200)
    return (j - 1) * val


def K_jl_branches(j: int, l: int, theta: float, argument: str = "printed") -> float:
    """Incomplete-beta branch formula for K_jl.

    ``argument="printed"`` evaluates the incomplete beta at sqrt(sin theta);
    ``argument="sin2"`` uses sin^2 theta, which is what the substitution
    s = sin^2 t gives.
    """
    p, q = (j - 1 - l) / 2, (l + 1) / 2
    x = math.sqrt(math.sin(theta)) if argument == "printed" else math.sin(theta) ** 2
    x = min(max(x, 0.0), 1.0)
    ib = incomplete_beta(p, q, x)
    full = math.exp(special.betaln(p, q))
    if theta >= math.pi / 2:
        return (j - 1) / 2 * ib
    return (-1) ** l * (j - 1) / 2 * (full - ib) + (j - 1) / 2 * full


def K_jl_diagnostic(j: int, l: int, theta: float, tol: float = 1e-8) -> dict:
    """Compare the quadrature K_jl with both branch-formula readings."""
    quad = K_jl(j, l, theta)
    out = {"quadrature": quad}
    for arg in ("printed", "sin2"):
        val = K_jl_branches(j, l, theta, arg)
        out[arg] = val
        out[f"{arg}_matches"] = abs(val - quad) <= tol * max(1.0, abs(quad))
    return out


def cone_gaussian_measure(cone: Cone2, rtol: float = 1e-10) -> float:
    """gamma(C) in polar coordinates about the apex w.

    Along a ray w + t d the radial integral has the closed form
    e^{-||w||^2/2} - b sqrt(2 pi) e^{-(||w||^2 - b^2)/2} (1 - Phi(b)), b = <w, d>,
    leaving a one-dimensional adaptive quadrature over the sector's angle.
    """
    w = cone.apex
    w2 = float(w @ w)
    a1 = math.atan2(cone.v1[1], cone.v1[0])
    # the sector sweeps from v1 to v2; go clockwise when v2 lies clockwise of v1
    ccw = cone.v1[0] * cone.v2[1] - cone.v1[1] * cone.v2[0] > 0
    start = a1 if ccw else a1 - cone.theta

    def integrand(psi):
        b = w[0] * math.cos(psi) + w[1] * math.sin(psi)
        ray = b * SQRT_2PI * math.exp(-(w2 - b * b) / 2 + special.log_ndtr(-b))
        return (math.exp(-w2 / 2) - ray) / (2 * math.pi)

    val, _ = integrate.quad(integrand, start, start + cone.theta, epsabs=1e-14, epsrel=rtol, limit=200)
    return float(val)


def gmf_cone2(cone: Cone2, J: int) -> GmfSeries:
    """Functionals of a planar cone: two edge strips plus the apex sector."""
    _check_order(J)
    w = cone.apex
    theta = cone.theta
    v1, v2, p1, p2 = cone.v1, cone.v2, cone.v1_perp, cone.v2_perp
    coeffs = [cone_gaussian_measure(cone)]
    edge = []
    for v, p in ((v1, p1), (v2, p2)):
        s = float(p @ w)
        edge.append((float(gaussian_tail(v @ w)), s, float(gaussian_density(s))))
    apex_weight = math.exp(-float(w @ w) / 2) / (2 * math.pi)
    a, b = float(v1 @ w), float(p1 @ w)
    for j in range(1, J + 1):
        m = sum(t * hermite(j - 1, s) * d for t, s, d in edge)
        if j >= 2:
            apex = sum(math.comb(j - 2, l) * K_jl(j, l, theta) * hermite(j - 2 - l, a)
                       * hermite(l, b) for l in range(j - 1))
            m += apex_weight * apex
        coeffs.append(m)
    return GmfSeries(np.array(coeffs))


def conjunction_cone_params(u: float, rho: float, apex: str = "derived") -> Cone2:
    """Cone {z1 >= u, z2 >= u} for z2 = rho y1 + sqrt(1 - rho^2) y2.

    The edges are v1 = (0, 1) and v2 = (sqrt(1 - rho^2), -rho).  With
    ``apex="derived"`` the apex solves <v1_perp, w> = <v2_perp, w> = u, giving
    w = (u, u (1 - rho) / sqrt(1 - rho^2)).  ``apex="printed"`` returns the
    alternative w = (u, u / sqrt(1 + rho)), kept for comparison only.
    """
    if not -1 < rho < 1:
        raise InvalidArgument("rho must lie in (-1, 1)")
    s = math.sqrt(1 - rho * rho)
    v1 = np.array([0.0, 1.0])
    v2 = np.array([s, -rho])
    if apex == "derived":
        w = np.array([u, u * (1 - rho) / s])
    elif apex == "printed":
        w = np.array([u, u / math.sqrt(1 + rho)])
    else:
        raise InvalidArgument(f"unknown apex reading {apex!r}")
    return Cone2(v1, v2, w)


def gmf_conjunction(u: float, rho: float, J: int, apex: str = "derived") -> GmfSeries:
    return gmf_cone2(conjunction_cone_params(u, rho, apex), J)


# --------------------------------------------------------------------------
# boundary integrals


@dataclass(frozen=True)
class BoundaryData:
    """Quadrature nodes on the boundary of a domain in R^k.

    ``weights[p, j - 1]`` is the order-j curvature measure localized at node p:
    the surface element times the (j-1)-th elementary symmetric function of
    the principal curvatures (curvatures positive where D is convex).
    """

    k: int
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.k)
        nrm = np.asarray(self.normals, dtype=float).reshape(-1, self.k)
        w = np.asarray(self.weights, dtype=float)
        w = w.reshape(pts.shape[0], -1) if w.size else np.zeros((pts.shape[0], 0))
        if nrm.shape != pts.shape:
            raise InvalidArgument("points and normals must have matching shapes")
        if pts.shape[0] and not np.allclose(np.linalg.norm(nrm, axis=1), 1.0, atol=1e-10):
            raise InvalidArgument("normals must be unit vectors")
        if w.shape[1] and np.any(w[:, 0] < 0):
            raise InvalidArgument("surface weights must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "normals", nrm)
        object.__setattr__(self, "weights", w)

    @property
    def orders(self) -> int:
        return self.weights.shape[1]


def gmf_boundary_integral(boundary: BoundaryData, J: int) -> GmfSeries:
    """M_1..M_J from the boundary integral of Hermite-weighted curvature measures.

    M_l = (2 pi)^{-k/2} sum_{m<l} (-1)^m (l-1)!/m! sum_p H_m(<p, nu_p>) e^{-||p||^2/2} w_{l-m}(p),

    where w_j vanishes for j > k.  The returned ``coeffs[0]`` is NaN-free but
    meaningless (set to 0); supply gamma(D) separately.
    """
    _check_order(J)
    k = boundary.k
    if boundary.points.shape[0] == 0:
        return GmfSeries(np.zeros(J + 1), meta={"m0": "not computed"})
    needed = min(J, k)
    if boundary.orders < needed:
        raise IncompleteBoundaryData(
            f"weights present for orders 1..{boundary.orders}, need 1..{needed}")
    p, nu, w = boundary.points, boundary.normals, boundary.weights
    s = np.einsum("ij,ij->i", p, nu)
    gauss = np.exp(-0.5 * np.einsum("ij,ij->i", p, p))
    coeffs = np.zeros(J + 1)
    for l in range(1, J + 1):
        total = 0.0
        for m in range(l):
            order = l - m
            if order > k:
                continue
            total += ((-1) ** m * math.factorial(l - 1) / math.factorial(m)
                      * np.sum(hermite(m, s) * gauss * w[:, order - 1]))
        coeffs[l] = total / (2 * math.pi) ** (k / 2)
    return GmfSeries(coeffs, meta={"m0": "not computed"})


def hyperplane_boundary(direction, u: float, half_width: float = 12.0, n_nodes: int = 400) -> BoundaryData:
    """Gauss-Legendre nodes on the truncated line {<x, z> = u} in R^2 bounding {<x, z> >= u}."""
    z = _unit(direction, "direction")
    if z.shape != (2,):
        raise InvalidArgument("hyperplane boundary is implemented in R^2")
    t, wt = np.polynomial.legendre.leggauss(n_nodes)
    t, wt = t * half_width, wt * half_width
    tangent = np.array([-z[1], z[0]])
    pts = u * z + t[:, None] * tangent
    normals = np.broadcast_to(-z, pts.shape)
    weights = np.column_stack([wt, np.zeros_like(wt)])
    return BoundaryData(2, pts, normals, weights)


def circle_boundary(radius: float, n_nodes: int = 256) -> BoundaryData:
    """Boundary of the disk complement {||x|| >= radius} in R^2.

    The outward normal of the complement points to the origin and the
    boundary curvature relative to D is -1/radius.
    """
    phi = 2 * math.pi * np.arange(n_nodes) / n_nodes
    pts = radius * np.column_stack([np.cos(phi), np.sin(phi)])
    ds = np.full(n_nodes, 2 * math.pi * radius / n_nodes)
    weights = np.column_stack([ds, -ds / radius])
    return BoundaryData(2, pts, -pts / radius, weights)


# --------------------------------------------------------------------------
# coarea estimates


@dataclass(frozen=True)
class CoareaEstimate:
    M1: float
    M1_se: float
    M2: float
    M2_se: float
    epsilon: float
    n_samples: int


def gmf_m1_m2_coarea(domain: Implicit | FRegion | HalfSpace | BallComplement, epsilon: float | None = None,
                     n_samples: int = 1_000_000, seed: int = 0, richardson: bool = False,
                     threads=1) -> CoareaEstimate:
    """M_1 and M_2 of {F >= u} by kernel-window Monte Carlo.

    M_1 = E[||grad F|| | F = u] phi_F(u) and
    M_2 = E[-LF + Hess F(grad F, grad F)/||grad F||^2 | F = u] phi_F(u),
    each estimated as (1 / 2 eps) E[1{|F - u| < eps} g].  Bias is O(eps^2).
    """
    dom = _as_implicit(domain)
    eps = default_epsilon(dom.level) if epsilon is None else epsilon
    (m1, s1), (m2, s2) = window_estimates(
        dom.F, dom.level, [gradient_norm, mean_curvature_integrand], eps, n_samples, seed,
        richardson=richardson, threads=threads)
    return CoareaEstimate(m1, s1, m2, s2, eps, n_samples)


def _as_implicit(domain) -> Implicit:
    if isinstance(domain, Implicit):
        return domain
    if isinstance(domain, FRegion):
        return domain.as_implicit()
    if isinstance(domain, HalfSpace):
        return Implicit(domain.k, maps.linear(domain.direction), domain.level, math.inf)
    if isinstance(domain, BallComplement):
        return Implicit(domain.k, maps.euclidean_norm(domain.k), domain.radius, domain.radius)
    if isinstance(domain, NoncentralBallComplement):
        mu = domain.center
        base = maps.euclidean_norm(domain.k)
        F = maps.SmoothMap("noncentral-chi", domain.k, lambda x: base.value(x - mu),
                           lambda x: base.grad(x - mu), lambda x: base.hess(x - mu))
        return Implicit(domain.k, F, domain.radius, domain.radius)
    raise InvalidArgument(f"no implicit description for {type(domain).__name__}")


# --------------------------------------------------------------------------
# dispatch


def gmf(domain, J: int, tol: float = 1e-12) -> GmfSeries:
    """Closed-form functionals of any catalog domain."""
    if isinstance(domain, HalfSpace):
        return gmf_half_space(domain.level, J)
    if isinstance(domain, BallComplement):
        return gmf_chi(domain.k, domain.radius, J)
    if isinstance(domain, NoncentralBallComplement):
        return gmf_noncentral_chi(domain.k, domain.alpha, domain.radius, J, tol)
    if isinstance(domain, FRegion):
        return gmf_f_field(domain.k1, domain.k2, domain.level, J)
    if isinstance(domain, Cone2):
        return gmf_cone2(domain, J)
    raise InvalidArgument(f"no closed form for {type(domain).__name__}")


def gaussian_measure(domain) -> float:
    """gamma(D) for catalog domains."""
    return gmf(domain, 0)[0]


__all__ = [
    "HalfSpace", "BallComplement", "NoncentralBallComplement", "FRegion", "Cone2", "Implicit",
    "Domain", "GmfSeries", "BoundaryData", "CoareaEstimate",
    "gmf", "gmf_half_space", "gmf_chi", "gmf_noncentral_chi", "gmf_f_field",
    "gmf_f_field_surface", "f_surface_integral", "f_tail", "K_jl", "K_jl_branches",
    "K_jl_diagnostic", "gmf_cone2", "cone_gaussian_measure", "conjunction_cone_params",
    "gmf_conjunction", "gmf_boundary_integral", "hyperplane_boundary", "circle_boundary",
    "gmf_m1_m2_coarea", "gaussian_measure",
]
