"""The Gaussian kinematic formula.

    E[chi(M cap y^{-1} D)] = sum_{j=0}^{n} L_j(M) (2 pi)^{-j/2} M_j(D)

The (2 pi)^{-j/2} factor is applied here and nowhere else: gmf emits raw
tube coefficients and lkc emits raw curvatures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gmf as _gmf
from .errors import InsufficientOrder, InvalidArgument
from .gmf import GmfSeries
from .lkc import LkcVector


@dataclass(frozen=True)
class GkfResult:
    expected_chi: float
    terms: np.ndarray
    truncation_order: int


def expected_euler_char(lkc: LkcVector, gmf: GmfSeries) -> GkfResult:
    n = lkc.n
    if gmf.J < n:
        raise InsufficientOrder(f"need Minkowski functionals up to order {n}, have {gmf.J}")
    j = np.arange(n + 1)
    terms = lkc.values * (2 * math.pi) ** (-j / 2) * gmf.coeffs[: n + 1]
    return GkfResult(float(np.sum(terms)), terms, n)


@dataclass(frozen=True)
class TailApprox:
    value: float
    raw: float
    clamped: bool


def sup_tail_approx(lkc: LkcVector, gmf: GmfSeries) -> TailApprox:
    """P[sup f >= u] approximated by E[chi], clamped to [0, 1] with a flag."""
    raw = expected_euler_char(lkc, gmf).expected_chi
    value = min(max(raw, 0.0), 1.0)
    return TailApprox(value, raw, value != raw)


# --------------------------------------------------------------------------
# families of Gaussian-related fields

FAMILIES = ("gaussian", "chi", "chi2", "noncentral-chi2", "f", "conjunction")


def family_domain(family: str, u: float, **params):
    """Domain {F >= u} for a named family of Gaussian-related fields.

    ``chi2`` and ``chi`` with levels u and sqrt(u) map to the same ball
    complement, so their functionals coincide exactly.
    """
    if family == "gaussian":
        return _gmf.HalfSpace(np.array([1.0]), float(u))
    if family in ("chi", "chi2"):
        k = int(params.get("k", 1))
        if family == "chi2":
            if u <= 0:
                raise InvalidArgument("chi-squared levels must be positive")
            u = math.sqrt(u)
        return _gmf.BallComplement(k, float(u))
    if family == "noncentral-chi2":
        k = int(params.get("k", 1))
        alpha = float(params.get("alpha", 0.0))
        if u <= 0:
            raise InvalidArgument("chi-squared levels must be positive")
        center = np.zeros(k)
        center[0] = math.sqrt(alpha)
        return _gmf.NoncentralBallComplement(k, center, math.sqrt(u))
    if family == "f":
        return _gmf.FRegion(int(params["k1"]), int(params["k2"]), float(u))
    if family == "conjunction":
        return _gmf.conjunction_cone_params(float(u), float(params["rho"]),
                                            params.get("apex", "derived"))
    raise InvalidArgument(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def family_gmf(family: str, u: float, J: int, **params) -> GmfSeries:
    return _gmf.gmf(family_domain(family, u, **params), J, float(params.get("tol", 1e-12)))


def ec_density(family: str, j: int, u: float, **params) -> float:
    """rho_j(u) = (2 pi)^{-j/2} M_j of the family's excursion domain."""
    if j < 0:
        raise InvalidArgument("order must be >= 0")
    return (2 * math.pi) ** (-j / 2) * family_gmf(family, u, j, **params)[j]
