"""Monte Carlo Gaussian tube volumes and coefficient extraction.

A tube curve estimates gamma(T(D, r)) on a grid of radii from ONE set of
Gaussian samples: each sample's distance to D is computed once and compared
with every radius.  The indicator events are nested in r, so the estimates
are exactly monotone and their covariance is known in closed form,

    Cov(V_a, V_b) = (V_min(a,b) - V_a V_b) / N,

which the coefficient fit uses as its generalized-least-squares weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special

from .coarea import coarea_mc
from .errors import FitUnstable, InvalidArgument, ProjectionFailure
from .gmf import (BallComplement, Cone2, FRegion, HalfSpace, Implicit,
                  NoncentralBallComplement)
from .mc import map_chunks

PROJECTION_MAX_ITER = 200
PROJECTION_TOL = 1e-10
COND_LIMIT = 1e10


# --------------------------------------------------------------------------
# distances


def _cone_distance(cone: Cone2, x: np.ndarray) -> np.ndarray:
    y = x - cone.apex
    inside = (y @ cone.v1_perp >= 0) & (y @ cone.v2_perp >= 0)
    best = np.full(y.shape[0], np.inf)
    for v in (cone.v1, cone.v2):
        t = np.maximum(y @ v, 0.0)
        best = np.minimum(best, np.linalg.norm(y - t[:, None] * v, axis=1))
    return np.where(inside, 0.0, best)


def _f_region_distance(dom: FRegion, x: np.ndarray) -> np.ndarray:
    # {||x1|| >= c ||x2||} is a rotation-invariant cone in each block; in the
    # (||x1||, ||x2||) quarter plane its boundary is the ray a = c b.
    c = math.sqrt(dom.k1 * dom.level / dom.k2)
    a = np.linalg.norm(x[:, :dom.k1], axis=1)
    b = np.linalg.norm(x[:, dom.k1:], axis=1)
    return np.maximum(c * b - a, 0.0) / math.sqrt(1.0 + c * c)


def _implicit_distance(dom: Implicit, x: np.ndarray) -> np.ndarray:
    F = dom.F
    if F.grad is None:
        raise InvalidArgument("implicit domains need a gradient evaluator")
    fx = F(x)
    out = np.zeros(x.shape[0])
    todo = np.flatnonzero(fx < dom.level)
    if todo.size == 0:
        return out
    xs = x[todo]
    y = xs.copy()
    for _ in range(PROJECTION_MAX_ITER):
        g = F.grad(y)
        gg = np.sum(g * g, axis=1)
        if np.any(gg == 0):
            raise ProjectionFailure("gradient vanished during projection")
        # closest point to x on the linearized level set at y
        lam = (F(y) - dom.level + np.sum(g * (xs - y), axis=1)) / gg
        y_new = xs - lam[:, None] * g
        step = np.max(np.linalg.norm(y_new - y, axis=1))
        y = y_new
        if step < PROJECTION_TOL:
            break
    else:
        raise ProjectionFailure(
            f"projection onto the level set did not converge in {PROJECTION_MAX_ITER} iterations")
    out[todo] = np.linalg.norm(xs - y, axis=1)
    return out


def distance_to_domain(domain, x) -> np.ndarray | float:
    """Euclidean distance from the point(s) ``x`` to D; 0 inside D."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if isinstance(domain, HalfSpace):
        d = np.maximum(domain.level - x @ domain.direction, 0.0)
    elif isinstance(domain, BallComplement):
        d = np.maximum(domain.radius - np.linalg.norm(x, axis=1), 0.0)
    elif isinstance(domain, NoncentralBallComplement):
        d = np.maximum(domain.radius - np.linalg.norm(x - domain.center, axis=1), 0.0)
    elif isinstance(domain, Cone2):
        d = _cone_distance(domain, x)
    elif isinstance(domain, FRegion):
        d = _f_region_distance(domain, x)
    elif isinstance(domain, Implicit):
        d = _implicit_distance(domain, x)
    else:
        raise InvalidArgument(f"unsupported domain {type(domain).__name__}")
    return float(d[0]) if single else d


def _domain_dim(domain) -> int:
    return int(domain.k)


# --------------------------------------------------------------------------
# tube curves


@dataclass(frozen=True)
class TubeCurve:
    """Estimated gamma(T(D, r)) on increasing radii.

    ``n_samples = 0`` marks a curve without Monte Carlo noise (e.g. an exact
    curve); its ``std_errors`` are then used as plain fit weights.
    """

    radii: np.ndarray
    volumes: np.ndarray
    std_errors: np.ndarray
    n_samples: int = 0
    seed: int | None = None
    critical_radius: float = math.inf
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.volumes, dtype=float)
        s = np.asarray(self.std_errors, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.shape != s.shape:
            raise InvalidArgument("radii, volumes and std_errors must be vectors of equal length")
        if np.any(r < 0) or np.any(np.diff(r) <= 0):
            raise InvalidArgument("radii must be nonnegative and strictly increasing")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "volumes", v)
        object.__setattr__(self, "std_errors", s)

    @classmethod
    def exact(cls, radii, func, critical_radius: float = math.inf) -> TubeCurve:
        """Noise-free curve from a callable r -> volume, unit weights."""
        radii = np.asarray(radii, dtype=float)
        vols = np.array([func(r) for r in radii], dtype=float)
        return cls(radii, vols, np.ones_like(radii), 0, None, critical_radius)

    def covariance(self) -> np.ndarray:
        """Covariance of the volume estimates (nested events under CRN)."""
        if self.n_samples <= 0:
            return np.diag(np.square(self.std_errors))
        v = self.volumes
        vmin = np.minimum.outer(v, v)
        return (vmin - np.outer(v, v)) / self.n_samples

    def to_dict(self) -> dict:
        return {"radii": self.radii.tolist(), "volumes": self.volumes.tolist(),
                "std_errors": self.std_errors.tolist(), "n_samples": self.n_samples,
                "seed": self.seed}


def tube_curve(domain, radii, n_samples: int, seed: int, chunk_size: int = 1_000_000,
               threads=1) -> TubeCurve:
    """gamma(T(D, r)) for all radii from one common sample set."""
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise InvalidArgument("radii must be a non-empty vector")
    if np.any(radii < 0):
        raise InvalidArgument("radii must be nonnegative")
    order = np.sort(radii)
    k = _domain_dim(domain)

    def work(rng, size):
        d = np.sort(distance_to_domain(domain, rng.standard_normal((size, k))))
        return np.searchsorted(d, order, side="right")

    counts = np.sum(map_chunks(work, seed, n_samples, chunk_size, threads), axis=0)
    vols = counts / n_samples
    se = np.sqrt(vols * (1 - vols) / n_samples)
    return TubeCurve(order, vols, se, n_samples, seed,
                     float(getattr(domain, "critical_radius", math.inf)))


def mc_tube_volume(domain, r: float, n_samples: int, seed: int, threads=1) -> tuple[float, float]:
    """Fraction of standard Gaussian samples within distance r of D, with binomial SE."""
    if r < 0:
        raise InvalidArgument("radius must be nonnegative")
    c = tube_curve(domain, [r], n_samples, seed, threads=threads)
    return float(c.volumes[0]), float(c.std_errors[0])


# --------------------------------------------------------------------------
# coefficient fit


@dataclass(frozen=True)
class CoefficientFit:
    """Fitted M_0..M_J in the r^j / j! convention."""

    J: int
    coefficients: np.ndarray
    covariance: np.ndarray
    condition: float
    degree: int

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def z_scores(self, reference) -> np.ndarray:
        ref = np.asarray(reference, dtype=float)[: self.J + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.coefficients - ref) / self.std_errors

    def to_dict(self) -> dict:
        return {"J": self.J, "coefficients": self.coefficients.tolist(),
                "std_errors": self.std_errors.tolist(), "condition": self.condition,
                "degree": self.degree}


def fit_tube_coefficients(curve: TubeCurve, J: int, guard: int = 2) -> CoefficientFit:
    """Least-squares fit of gamma(T(D, r)) against {r^j / j!}, j <= J + guard.

    The extra ``guard`` degrees absorb Taylor truncation.  Monte Carlo curves
    are fitted by generalized least squares with the nested-event covariance;
    noise-free curves use the weights 1 / se^2.
    """
    if J < 0 or guard < 0:
        raise InvalidArgument("J and guard must be nonnegative")
    r = curve.radii
    if r.size < 2 * (J + 2):
        raise InvalidArgument(f"need at least {2 * (J + 2)} radii for order {J}, got {r.size}")
    r_max = float(r[-1])
    limit = min(1.0, curve.critical_radius) / 4
    if r_max > limit * (1 + 1e-12):
        raise InvalidArgument(f"largest radius {r_max} exceeds min(1, r_c)/4 = {limit}")
    if r_max <= 0:
        raise InvalidArgument("radii must include a positive value")
    degree = J + guard
    if r.size < degree + 1:
        raise InvalidArgument("fewer radii than fitted coefficients")
    t = r / r_max
    X = np.vander(t, degree + 1, increasing=True)
    cov = curve.covariance()
    if curve.n_samples > 0:
        # jitter the diagonal at round-off scale so the factorization exists
        # even when the smallest radii share all their samples
        jitter = 1e-12 * max(float(np.max(np.diag(cov))), 1e-300)
        L = linalg.cholesky(cov + jitter * np.eye(r.size), lower=True)
    else:
        L = np.diag(curve.std_errors)
    Xw = linalg.solve_triangular(L, X, lower=True)
    yw = linalg.solve_triangular(L, curve.volumes, lower=True)
    scale = np.linalg.norm(Xw, axis=0)
    Xs = Xw / scale
    cond = float(np.linalg.cond(Xs))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise FitUnstable(f"design condition number {cond:.3e} exceeds {COND_LIMIT:.0e}")
    q, rr = np.linalg.qr(Xs)
    beta_s = linalg.solve_triangular(rr, q.T @ yw)
    rinv = linalg.solve_triangular(rr, np.eye(degree + 1))
    cov_s = rinv @ rinv.T
    if curve.n_samples <= 0:
        resid = yw - Xs @ beta_s
        dof = max(r.size - degree - 1, 1)
        cov_s = cov_s * float(resid @ resid) / dof
    # back to the r^j / j! convention: beta_j t^j = M_j r^j / j!
    conv = special.factorial(np.arange(degree + 1)) / r_max ** np.arange(degree + 1) / scale
    coef = conv * beta_s
    cov_m = cov_s * np.outer(conv, conv)
    return CoefficientFit(J, coef[: J + 1], cov_m[: J + 1, : J + 1], cond, degree)


def fit_exact_curve(func, radii, J: int, guard: int = 8, dps: int = 40,
                    critical_radius: float = math.inf) -> CoefficientFit:
    """Fit a noise-free tube curve in extended precision.

    ``func`` maps an ``mpmath`` radius to the tube volume and should evaluate
    in ``mpmath`` arithmetic.  In double precision the fitted M_4 cannot be
    pushed below about 1e-7 relative error, because differentiating a curve
    known to 1e-16 four times over [0, 1/4] amplifies round-off; carrying
    ``dps`` digits removes that floor so only Taylor truncation remains.
    """
    import mpmath

    r = np.asarray(radii, dtype=float)
    if r.size < 2 * (J + 2):
        raise InvalidArgument(f"need at least {2 * (J + 2)} radii for order {J}, got {r.size}")
    if r[-1] > min(1.0, critical_radius) / 4 * (1 + 1e-12):
        raise InvalidArgument("largest radius exceeds min(1, r_c)/4")
    degree = J + guard
    if r.size < degree + 1:
        raise InvalidArgument("fewer radii than fitted coefficients")
    with mpmath.workdps(dps):
        r_max = mpmath.mpf(float(r[-1]))
        rs = [mpmath.mpf(float(x)) for x in r]
        X = mpmath.matrix([[(x / r_max) ** j for j in range(degree + 1)] for x in rs])
        y = mpmath.matrix([func(x) for x in rs])
        beta, resid = mpmath.qr_solve(X, y)
        coef = np.array([float(beta[j] * mpmath.factorial(j) / r_max**j) for j in range(J + 1)])
    cond = float(np.linalg.cond(np.vander(r / r[-1], degree + 1, increasing=True)))
    return CoefficientFit(J, coef, np.zeros((J + 1, J + 1)), cond, degree)


__all__ = ["distance_to_domain", "TubeCurve", "tube_curve", "mc_tube_volume",
           "CoefficientFit", "fit_tube_coefficients", "fit_exact_curve", "coarea_mc"]
