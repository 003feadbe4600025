"""Lipschitz-Killing curvatures of flat parameter spaces.

With the metric induced by a field whose first derivatives have variance
mu2, every L_j picks up a factor mu2^{j/2}.  Values here follow the
Weyl-Steiner convention

    lambda(T(M, r)) = sum_j L_{n-j}(M) omega_j r^j     (M convex, in R^n),

which is the only place the omega-weighted convention is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InvalidArgument
from .special_fn import unit_ball_volume


@dataclass(frozen=True)
class LkcVector:
    values: np.ndarray
    mu2: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0 or not np.all(np.isfinite(v)):
            raise InvalidArgument("LKC values must be a finite non-empty vector")
        if not self.mu2 > 0:
            raise InvalidArgument("mu2 must be positive")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size - 1

    def __getitem__(self, j: int) -> float:
        return float(self.values[j])

    def __len__(self) -> int:
        return self.values.size


def _scaled(base, mu2: float) -> LkcVector:
    if not mu2 > 0:
        raise InvalidArgument("mu2 must be positive")
    base = np.asarray(base, dtype=float)
    return LkcVector(base * mu2 ** (np.arange(base.size) / 2), mu2)


def elementary_symmetric(xs) -> np.ndarray:
    """e_0..e_n of the numbers xs."""
    e = np.zeros(len(xs) + 1)
    e[0] = 1.0
    for x in xs:
        e[1:] = e[1:] + x * e[:-1]
    return e


def _sides(sides) -> np.ndarray:
    s = np.atleast_1d(np.asarray(sides, dtype=float))
    if not 1 <= s.size <= 3:
        raise InvalidArgument("boxes of dimension 1 to 3 are supported")
    if np.any(s <= 0):
        raise InvalidArgument("side lengths must be positive")
    return s


def lkc_box(sides, mu2: float = 1.0) -> LkcVector:
    """L_j = e_j(sides) mu2^{j/2}."""
    return _scaled(elementary_symmetric(_sides(sides)), mu2)


def lkc_interval(T: float, mu2: float = 1.0) -> LkcVector:
    return lkc_box([T], mu2)


def lkc_flat_torus2(T: float, mu2: float = 1.0) -> LkcVector:
    """Square flat torus of side T: (0, 0, T^2 mu2)."""
    if not T > 0:
        raise InvalidArgument("torus side must be positive")
    return _scaled([0.0, 0.0, T * T], mu2)


def lkc_sphere2(r: float, mu2: float = 1.0) -> LkcVector:
    """Round 2-sphere of radius r: (2, 0, 4 pi r^2 mu2).

    Assumes the field induces mu2 times the round metric; the simulator has
    no curved geometries, so these values serve analytic use only.
    """
    if not r > 0:
        raise InvalidArgument("sphere radius must be positive")
    return _scaled([2.0, 0.0, 4 * math.pi * r * r], mu2)


def point() -> LkcVector:
    return LkcVector(np.array([1.0]))


def steiner_tube_volume_box(sides, r: float) -> float:
    """Lebesgue volume of the r-tube around a box, exact for every r >= 0.

    Computed by decomposing the tube into the pieces attached to each face:
    the piece over the face spanned by the sides in S contributes
    prod_{i in S} a_i * omega_{n-|S|} r^{n-|S|}.
    """
    s = _sides(sides)
    if r < 0:
        raise InvalidArgument("radius must be nonnegative")
    n = s.size
    total = 0.0
    for size in range(n + 1):
        for S in combinations(range(n), size):
            total += float(np.prod(s[list(S)])) * unit_ball_volume(n - size) * r ** (n - size)
    return total


def minkowski_from_lkc(lkc: LkcVector, k: int | None = None) -> np.ndarray:
    """Lebesgue Minkowski functionals M_{k-j} / (k-j)! = L_j omega_{k-j}.

    Returns the array indexed by i = k - j holding M_i for an n-dimensional
    body viewed in R^k (k defaults to n).
    """
    n = lkc.n
    k = n if k is None else k
    if k < n:
        raise InvalidArgument("ambient dimension must be at least the LKC order")
    out = np.zeros(k + 1)
    for j in range(n + 1):
        i = k - j
        out[i] = lkc[j] * unit_ball_volume(i) * math.factorial(i)
    return out


def lkc_from_minkowski(minkowski, k: int) -> np.ndarray:
    m = np.asarray(minkowski, dtype=float)
    return np.array([m[k - j] / (unit_ball_volume(k - j) * math.factorial(k - j))
                     for j in range(k + 1)])


def lkc_catalog(kind: str, **params) -> LkcVector:
    """Build an LkcVector by name: interval, box, torus, sphere, point."""
    mu2 = float(params.get("mu2", 1.0))
    if kind == "interval":
        return lkc_interval(params["T"], mu2)
    if kind in ("box", "rectangle"):
        return lkc_box(params["sides"], mu2)
    if kind == "torus":
        return lkc_flat_torus2(params["T"], mu2)
    if kind == "sphere":
        return lkc_sphere2(params["r"], mu2)
    if kind == "point":
        return point()
    raise InvalidArgument(f"unknown parameter space {kind!r}")
