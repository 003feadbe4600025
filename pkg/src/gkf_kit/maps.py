"""Pointwise maps F : R^k -> R used to build Gaussian-related fields.

Each map acts on arrays whose last axis holds the k components, so the same
descriptor serves Monte Carlo samples of shape (n, k) and stacked field
grids of shape (ny, nx, k).  Smooth maps also expose their gradient and
Hessian, which the coarea estimators need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class SmoothMap:
    """Descriptor of a map with optional gradient and Hessian evaluators."""

    name: str
    k: int
    value: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    hess: Callable[[np.ndarray], np.ndarray] | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.k:
            raise InvalidArgument(f"map {self.name} expects {self.k} components, got {x.shape[-1]}")
        return self.value(x)

    @property
    def smooth(self) -> bool:
        return self.grad is not None and self.hess is not None


def _eye_like(x: np.ndarray) -> np.ndarray:
    k = x.shape[-1]
    return np.broadcast_to(np.eye(k), x.shape[:-1] + (k, k))


def linear(z) -> SmoothMap:
    """F(x) = <x, z>."""
    z = np.asarray(z, dtype=float)
    return SmoothMap(
        "linear", z.size,
        value=lambda x: x @ z,
        grad=lambda x: np.broadcast_to(z, x.shape).copy(),
        hess=lambda x: np.zeros(x.shape + (z.size,)),
        params={"z": z.tolist()},
    )


def identity() -> SmoothMap:
    return linear([1.0])


def shifted_sum_of_squares(mu) -> SmoothMap:
    """F(x) = ||x - mu||^2 (noncentral chi-squared field)."""
    mu = np.asarray(mu, dtype=float)
    return SmoothMap(
        "noncentral-chi2", mu.size,
        value=lambda x: np.sum(np.square(x - mu), axis=-1),
        grad=lambda x: 2.0 * (x - mu),
        hess=lambda x: 2.0 * _eye_like(x),
        params={"mu": mu.tolist()},
    )


def sum_of_squares(k: int) -> SmoothMap:
    """F(x) = ||x||^2 (chi-squared field with k degrees of freedom)."""
    m = shifted_sum_of_squares(np.zeros(k))
    return SmoothMap("chi2", k, m.value, m.grad, m.hess, {"k": k})


def euclidean_norm(k: int) -> SmoothMap:
    """F(x) = ||x||, smooth away from the origin."""

    def grad(x):
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        return x / r

    def hess(x):
        r = np.linalg.norm(x, axis=-1)[..., None, None]
        unit = x / r[..., 0]
        return (_eye_like(x) - unit[..., :, None] * unit[..., None, :]) / r

    return SmoothMap("chi", k, lambda x: np.linalg.norm(x, axis=-1), grad, hess, {"k": k})


def f_ratio(k1: int, k2: int) -> SmoothMap:
    """F(x) = (k2/k1) U/V with U, V the squared norms of the two blocks."""
    if k1 < 1 or k2 < 1:
        raise InvalidArgument("F-ratio needs k1, k2 >= 1")
    c = k2 / k1

    def split(x):
        return x[..., :k1], x[..., k1:]

    def value(x):
        a, b = split(x)
        return c * np.sum(a * a, axis=-1) / np.sum(b * b, axis=-1)

    def grad(x):
        a, b = split(x)
        U = np.sum(a * a, axis=-1)[..., None]
        V = np.sum(b * b, axis=-1)[..., None]
        return np.concatenate([2 * c * a / V, -2 * c * U * b / V**2], axis=-1)

    def hess(x):
        a, b = split(x)
        U = np.sum(a * a, axis=-1)[..., None, None]
        V = np.sum(b * b, axis=-1)[..., None, None]
        out = np.zeros(x.shape + (k1 + k2,))
        out[..., :k1, :k1] = 2 * c * np.eye(k1) / V
        cross = -4 * c * a[..., :, None] * b[..., None, :] / V**2
        out[..., :k1, k1:] = cross
        out[..., k1:, :k1] = np.swapaxes(cross, -1, -2)
        outer = b[..., :, None] * b[..., None, :]
        out[..., k1:, k1:] = c * U * (-2 * np.eye(k2) / V**2 + 8 * outer / V**3)
        return out

    return SmoothMap("f", k1 + k2, value, grad, hess, {"k1": k1, "k2": k2})


def conjunction(rho: float) -> SmoothMap:
    """min(z1, z2) with z1 = y1, z2 = rho y1 + sqrt(1 - rho^2) y2 (not smooth)."""
    if not -1 < rho < 1:
        raise InvalidArgument("conjunction correlation must lie in (-1, 1)")
    s = np.sqrt(1 - rho * rho)

    def value(x):
        return np.minimum(x[..., 0], rho * x[..., 0] + s * x[..., 1])

    return SmoothMap("conjunction", 2, value, params={"rho": rho})
