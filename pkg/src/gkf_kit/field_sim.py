"""Stationary Gaussian fields on square grids by spectral synthesis.

Fields have the squared-exponential covariance C(h) = exp(-||h||^2 / (2 s^2)).
On an n x n torus the discrete spectrum of the wrapped covariance is clipped
at zero and scaled to sum to one, so every site has variance exactly one.
Rectangle fields are cut from a larger torus padded by at least 6 s, which
leaves wrap-around correlations below exp(-18).
"""

from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft

from .errors import InvalidArgument, UnderResolved
from .maps import SmoothMap

TOPOLOGIES = ("torus", "rectangle")
_TOPOLOGY_TAG = {"torus": 0, "rectangle": 1}
_HEADER = struct.Struct("<qdB")


@dataclass(frozen=True)
class SpectralModel:
    scale: float
    family: str = "squared-exponential"

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidArgument("covariance scale must be positive")
        if self.family != "squared-exponential":
            raise InvalidArgument("only the squared-exponential family is supported")

    def covariance(self, h) -> np.ndarray:
        return np.exp(-np.square(h) / (2 * self.scale**2))

    def mu2(self) -> float:
        """Variance of a first partial derivative, -C''(0) = 1 / s^2."""
        return 1.0 / self.scale**2

    def mu2_lattice(self, spacing: float, stencil: str = "central") -> float:
        """Expected value of the finite-difference estimate of mu2."""
        lag = 2 * spacing if stencil == "central" else spacing
        return 2 * (1 - math.exp(-lag**2 / (2 * self.scale**2))) / lag**2

    def check_resolved(self, spacing: float):
        if self.scale < 2 * spacing:
            raise UnderResolved(f"scale {self.scale} is below twice the grid spacing {spacing}")


@dataclass(frozen=True)
class FieldGrid:
    n: int
    spacing: float
    topology: str
    values: np.ndarray

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise InvalidArgument(f"topology must be one of {TOPOLOGIES}")
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.n, self.n):
            raise InvalidArgument(f"values must be {self.n} x {self.n}")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def side(self) -> float:
        return self.n * self.spacing

    def __mul__(self, c: float) -> FieldGrid:
        return FieldGrid(self.n, self.spacing, self.topology, self.values * float(c))

    __rmul__ = __mul__

    def to_bytes(self) -> bytes:
        """Header (n, spacing, topology tag) then row-major little-endian float64."""
        head = _HEADER.pack(self.n, self.spacing, _TOPOLOGY_TAG[self.topology])
        return head + np.ascontiguousarray(self.values, dtype="<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> FieldGrid:
        n, spacing, tag = _HEADER.unpack_from(data)
        topology = TOPOLOGIES[tag]
        vals = np.frombuffer(data, dtype="<f8", offset=_HEADER.size, count=n * n)
        return cls(n, spacing, topology, vals.reshape(n, n).copy())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in self.values:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


@lru_cache(maxsize=16)
def _spectral_amplitude(scale: float, n: int, spacing: float) -> np.ndarray:
    d = np.minimum(np.arange(n), n - np.arange(n)) * spacing
    c1 = np.exp(-np.square(d) / (2 * scale**2))
    # the covariance is separable, so is its spectrum
    lam1 = np.clip(fft.fft(c1).real, 0.0, None)
    lam = np.outer(lam1, lam1)
    lam /= lam.sum()
    amp = np.sqrt(lam)
    amp.setflags(write=False)
    return amp


def padded_size(model: SpectralModel, n: int, spacing: float) -> int:
    return fft.next_fast_len(n + math.ceil(6 * model.scale / spacing))


def synthesize_values(model: SpectralModel, n: int, spacing: float, topology: str,
                      rng: np.random.Generator, count: int = 1) -> np.ndarray:
    """``count`` independent fields as an array of shape (count, n, n)."""
    if topology not in TOPOLOGIES:
        raise InvalidArgument(f"topology must be one of {TOPOLOGIES}")
    if n < 2 or not spacing > 0:
        raise InvalidArgument("need n >= 2 and positive spacing")
    model.check_resolved(spacing)
    N = n if topology == "torus" else padded_size(model, n, spacing)
    amp = _spectral_amplitude(float(model.scale), N, float(spacing))
    out = np.empty((count, n, n))
    for i in range(count):
        z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        out[i] = fft.fft2(amp * z).real[:n, :n]
    return out


def synthesize_field(model: SpectralModel, n: int, spacing: float, topology: str, seed) -> FieldGrid:
    """One field; ``seed`` is anything ``np.random.default_rng`` accepts."""
    rng = np.random.default_rng(seed)
    return FieldGrid(n, spacing, topology, synthesize_values(model, n, spacing, topology, rng)[0])


def mu2_components(values: np.ndarray, spacing: float, topology: str,
                   stencil: str = "central") -> tuple[float, float]:
    """Mean squared finite differences along axis 0 and axis 1.

    ``stencil="central"`` uses (f_{i+1} - f_{i-1}) / (2 spacing), which is
    consistent for the continuum mu2.  ``stencil="forward"`` uses
    (f_{i+1} - f_i) / spacing, whose expectation 2 (1 - C(spacing)) / spacing^2
    is the rate at which a lattice excursion set gains boundary between
    neighbouring sites.
    """
    v = np.asarray(values, dtype=float)
    if stencil == "central":
        step, width = 2, 2 * spacing
    elif stencil == "forward":
        step, width = 1, spacing
    else:
        raise InvalidArgument("stencil must be 'central' or 'forward'")
    out = []
    for axis in (0, 1):
        if topology == "torus":
            d = np.roll(v, -1, axis) - np.roll(v, step - 1, axis)
        else:
            n = v.shape[axis]
            d = v.take(range(step, n), axis) - v.take(range(0, n - step), axis)
        out.append(float(np.mean(np.square(d / width))))
    return out[0], out[1]


def mu2_empirical(fields, stencil: str = "central") -> tuple[float, float | None]:
    """Average squared difference quotient over sites, axes and fields.

    The standard error is taken over fields and is ``None`` for one field.
    """
    fields = list(fields)
    if not fields:
        raise InvalidArgument("need at least one field")
    per = np.array([np.mean(mu2_components(f.values, f.spacing, f.topology, stencil))
                    for f in fields])
    se = float(np.std(per, ddof=1) / math.sqrt(per.size)) if per.size > 1 else None
    return float(per.mean()), se


def derived_field(F: SmoothMap, components) -> FieldGrid:
    """Pointwise F(y_1(p), ..., y_k(p))."""
    components = list(components)
    if len(components) != F.k:
        raise InvalidArgument(f"map {F.name} needs {F.k} component fields, got {len(components)}")
    first = components[0]
    for c in components[1:]:
        if (c.n, c.spacing, c.topology) != (first.n, first.spacing, first.topology):
            raise InvalidArgument("component fields differ in shape, spacing or topology")
    stacked = np.stack([c.values for c in components], axis=-1)
    return FieldGrid(first.n, first.spacing, first.topology, F(stacked))


def excursion_mask(field: FieldGrid | np.ndarray, u: float) -> np.ndarray:
    vals = field.values if isinstance(field, FieldGrid) else np.asarray(field)
    return vals >= u


def sample_autocovariance(values: np.ndarray, lag: int, axis: int = 1) -> float:
    """Empirical covariance at an integer lag along one axis (wrapped)."""
    v = np.asarray(values, dtype=float)
    v = v - v.mean()
    return float(np.mean(v * np.roll(v, -lag, axis)))
