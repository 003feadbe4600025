"""Euler characteristics of binary masks.

A mask is read as the union of the CLOSED unit squares of its on-cells.  A
vertex or edge of the grid belongs to the union when it lies on at least
one on-cell, so chi = V - E + F counts each of them once.  Two squares that
meet only at a corner are connected, which makes the foreground
8-connected and the background 4-connected.

The Betti-number oracle below computes b0 and b1 by flood fill, without
counting cells, and is used to check the cell counts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

_N4 = ((1, 0), (-1, 0), (0, 1), (0, -1))
_N8 = _N4 + ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class CubicalComplexCounts:
    vertices: int
    edges: int
    faces: int

    @property
    def euler_characteristic(self) -> int:
        return self.vertices - self.edges + self.faces


def _as_mask(mask) -> np.ndarray:
    m = np.asarray(mask).astype(bool)
    if m.ndim != 2:
        raise InvalidArgument("mask must be two-dimensional")
    return m


def cubical_counts(mask, topology: str = "rectangle") -> CubicalComplexCounts:
    m = _as_mask(mask)
    if topology == "rectangle":
        p = np.pad(m, 1)
        v = p[:-1, :-1] | p[:-1, 1:] | p[1:, :-1] | p[1:, 1:]
        e_h = p[:-1, 1:-1] | p[1:, 1:-1]
        e_v = p[1:-1, :-1] | p[1:-1, 1:]
    elif topology == "torus":
        up = np.roll(m, 1, 0)
        left = np.roll(m, 1, 1)
        v = m | up | left | np.roll(up, 1, 1)
        e_h = m | up
        e_v = m | left
    else:
        raise InvalidArgument("topology must be 'rectangle' or 'torus'")
    return CubicalComplexCounts(int(v.sum()), int(e_h.sum() + e_v.sum()), int(m.sum()))


def euler_char_2d(mask, topology: str = "rectangle") -> int:
    """chi of the union of closed on-squares; the torus identifies opposite sides."""
    return cubical_counts(mask, topology).euler_characteristic


def euler_char_2d_batch(masks, topology: str = "rectangle") -> np.ndarray:
    """chi for a stack of masks of shape (m, ny, nx)."""
    m = np.asarray(masks).astype(bool)
    if topology == "rectangle":
        p = np.pad(m, ((0, 0), (1, 1), (1, 1)))
        v = p[:, :-1, :-1] | p[:, :-1, 1:] | p[:, 1:, :-1] | p[:, 1:, 1:]
        e = (p[:, :-1, 1:-1] | p[:, 1:, 1:-1]).sum((1, 2)) + (p[:, 1:-1, :-1] | p[:, 1:-1, 1:]).sum((1, 2))
    elif topology == "torus":
        up = np.roll(m, 1, 1)
        left = np.roll(m, 1, 2)
        v = m | up | left | np.roll(up, 1, 2)
        e = (m | up).sum((1, 2)) + (m | left).sum((1, 2))
    else:
        raise InvalidArgument("topology must be 'rectangle' or 'torus'")
    return v.sum((1, 2)).astype(int) - e.astype(int) + m.sum((1, 2)).astype(int)


def euler_char_1d(mask, topology: str = "interval") -> int:
    """Number of runs of on-cells; an all-on circle has chi = 0."""
    m = np.asarray(mask).astype(bool).ravel()
    if topology not in ("interval", "circle"):
        raise InvalidArgument("topology must be 'interval' or 'circle'")
    if m.size == 0 or not m.any():
        return 0
    if topology == "circle":
        if m.all():
            return 0
        return int(np.sum(m & ~np.roll(m, 1)))
    return int(m[0]) + int(np.sum(m[1:] & ~m[:-1]))


# --------------------------------------------------------------------------
# flood-fill oracle


def _components(cells: np.ndarray, neighbours, wrap: bool):
    """Flood-fill components; on the torus also the winding vectors of cycles.

    Each visited cell gets a lift in Z^2; an edge joining two cells whose
    lifts disagree by a multiple of the grid size closes a loop winding
    around the torus.
    """
    ny, nx = cells.shape
    lift = {}
    n_comp = 0
    windings = []
    for start in zip(*np.nonzero(cells)):
        if start in lift:
            continue
        n_comp += 1
        lift[start] = start
        queue = deque([start])
        while queue:
            i, j = queue.popleft()
            li, lj = lift[(i, j)]
            for di, dj in neighbours:
                a, b = i + di, j + dj
                if wrap:
                    a, b = a % ny, b % nx
                elif not (0 <= a < ny and 0 <= b < nx):
                    continue
                if not cells[a, b]:
                    continue
                target = (li + di, lj + dj)
                if (a, b) not in lift:
                    lift[(a, b)] = target
                    queue.append((a, b))
                elif wrap:
                    la, lb = lift[(a, b)]
                    w = ((target[0] - la) // ny, (target[1] - lb) // nx)
                    if w != (0, 0):
                        windings.append(w)
    return n_comp, windings


def betti_numbers_2d(mask, topology: str = "rectangle") -> tuple[int, int, int]:
    """(b0, b1, b2) of the closed-square union, by flood fill and duality.

    Rectangle: b0 counts 8-connected on-components and b1 counts bounded
    4-connected off-components.  Torus: b0 as before with wrap-around; for
    a proper subset X with open complement U, duality gives
    b1(X) = (2 - rank of the windings of loops in U) + b0(U) - 1.
    """
    m = _as_mask(mask)
    if topology == "rectangle":
        b0, _ = _components(m, _N8, wrap=False)
        holes, _ = _components(~np.pad(m, 1), _N4, wrap=False)
        return b0, holes - 1, 0
    if topology != "torus":
        raise InvalidArgument("topology must be 'rectangle' or 'torus'")
    if m.all():
        return 1, 2, 1
    b0, _ = _components(m, _N8, wrap=True)
    u0, windings = _components(~m, _N4, wrap=True)
    rank = int(np.linalg.matrix_rank(np.array(windings))) if windings else 0
    return b0, (2 - rank) + u0 - 1, 0


def euler_char_oracle(mask, topology: str = "rectangle") -> int:
    b0, b1, b2 = betti_numbers_2d(mask, topology)
    return b0 - b1 + b2
