"""Finite-difference derivatives with Richardson extrapolation.

These are the numerical oracles that closed-form derivatives are checked
against, so they deliberately know nothing about the functions they
differentiate.
"""

from __future__ import annotations

import math

import numpy as np


def central_difference(f, x, h, order: int = 1):
    """Central difference of the given order with step ``h``.

    Uses the symmetric stencil sum_i (-1)^i C(n, i) f(x + (n/2 - i) h) / h^n,
    whose leading error is O(h^2) for every order n.
    """
    if order == 0:
        return f(x)
    n = order
    total = 0
    for i in range(n + 1):
        total += (-1) ** i * math.comb(n, i) * f(x + (n - 2 * i) * h / 2)
    return total / h**n


def richardson(f, x, h=1e-3, order: int = 1, levels: int = 2):
    """Richardson-extrapolated central difference.

    ``levels`` halvings of the step are combined, removing the h^2, h^4, ...
    error terms in turn.  Arithmetic is generic, so passing ``mpmath`` numbers
    for ``x`` and ``h`` runs the whole stencil in extended precision.
    """
    table = [central_difference(f, x, h / 2**i, order) for i in range(levels + 1)]
    for lev in range(1, levels + 1):
        factor = 4.0**lev
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def derivative_grid(f, xs, h: float = 1e-3, order: int = 1, levels: int = 2) -> np.ndarray:
    return np.array([richardson(f, float(x), h, order, levels) for x in np.atleast_1d(xs)])
