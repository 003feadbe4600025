"""Window estimators of Gaussian surface integrals via the coarea formula.

For a level set F^{-1}{u} and a weight w,

    int_{F = u} w(x) phi(x) dH_{k-1}(x)
        = lim_{eps -> 0} (1 / 2 eps) E[1{|F(Z) - u| < eps} ||grad F(Z)|| w(Z)],

with Z standard Gaussian in R^k and phi its density.  The window estimator
has bias O(eps^2); combining the windows eps and 2 eps on the same samples,
(4 E_eps - E_2eps) / 3, removes the leading term.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import InvalidArgument, WindowTooNarrow
from .maps import SmoothMap
from .mc import map_chunks

#: weight(x, F, grad, hess) -> values; all arguments restricted to the window
Integrand = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray | None], np.ndarray]


def window_estimates(F: SmoothMap, u: float, integrands: list[Integrand], epsilon: float,
                     n_samples: int, seed: int, richardson: bool = False,
                     need_hessian: bool = True, chunk_size: int = 250_000,
                     threads=1) -> list[tuple[float, float]]:
    """(1 / 2 eps) E[1{|F - u| < eps} g(Z)] for each integrand g, with standard errors.

    Integrands receive only the samples inside the (widest) window.
    """
    if epsilon <= 0:
        raise InvalidArgument("epsilon must be positive")
    if F.grad is None or (need_hessian and F.hess is None):
        raise InvalidArgument(f"map {F.name} lacks the derivative evaluators needed here")
    width = 2 * epsilon if richardson else epsilon
    n_int = len(integrands)

    def work(rng, size):
        z = rng.standard_normal((size, F.k))
        f = F(z)
        inside = np.abs(f - u) < width
        zi, fi = z[inside], f[inside]
        g = F.grad(zi)
        h = F.hess(zi) if need_hessian else None
        vals = np.stack([np.asarray(w(zi, fi, g, h), dtype=float) for w in integrands])
        near = (np.abs(fi - u) < epsilon).astype(float)
        if richardson:
            # per-sample combination of the two windows
            vals = vals * (4 * near / (2 * epsilon) - 1 / (4 * epsilon)) / 3
        else:
            vals = vals * near / (2 * epsilon)
        return int(near.sum()), vals.sum(axis=1), np.square(vals).sum(axis=1)

    results = map_chunks(work, seed, n_samples, chunk_size, threads)
    count = sum(r[0] for r in results)
    if count == 0:
        raise WindowTooNarrow(f"no sample fell within {epsilon} of the level {u}")
    total = np.sum([r[1] for r in results], axis=0).reshape(n_int)
    total_sq = np.sum([r[2] for r in results], axis=0).reshape(n_int)
    mean = total / n_samples
    var = np.maximum(total_sq / n_samples - mean**2, 0.0) * n_samples / max(n_samples - 1, 1)
    se = np.sqrt(var / n_samples)
    return [(float(m), float(s)) for m, s in zip(mean, se)]


def gradient_norm(x, f, g, h):
    return np.linalg.norm(g, axis=-1)


def mean_curvature_integrand(x, f, g, h):
    """-LF + Hess F(grad F, grad F) / ||grad F||^2 with LF = Laplacian F - <grad F, x>."""
    lap = np.trace(h, axis1=-2, axis2=-1)
    lf = lap - np.sum(g * x, axis=-1)
    quad = np.einsum("ni,nij,nj->n", g, h, g)
    return -lf + quad / np.sum(g * g, axis=-1)


def coarea_mc(F: SmoothMap, u: float, weight: Callable[[np.ndarray], np.ndarray] | None,
              epsilon: float, n_samples: int, seed: int, richardson: bool = False,
              threads=1) -> tuple[float, float]:
    """Estimate int_{F = u} w phi dH_{k-1} by the coarea window estimator.

    ``weight(x, f, grad, hess)`` receives the in-window samples and may use the
    derivatives of F; ``None`` means w = 1.  A weight identically zero gives 0.
    """

    def integrand(x, f, g, h):
        norm = np.linalg.norm(g, axis=-1)
        if weight is None:
            return norm
        return norm * np.asarray(weight(x, f, g, h), dtype=float)

    need_h = weight is not None and F.hess is not None
    return window_estimates(F, u, [integrand], epsilon, n_samples, seed, richardson,
                            need_hessian=need_h, threads=threads)[0]


def default_epsilon(u: float) -> float:
    return 0.01 * max(abs(u), 1.0)
