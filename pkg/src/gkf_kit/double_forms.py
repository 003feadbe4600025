"""Double forms on a finite-dimensional inner-product space.

A double form of grade (p, q) is stored as a dense coefficient matrix over
strictly increasing multi-indices,

    alpha = sum_{I, J} a[I, J] e^I (x) e^J,    e^I = e^{i_1} ^ ... ^ e^{i_p},

with rows enumerating the p-subsets of {0..dim-1} and columns the q-subsets,
both in ``itertools.combinations`` order.  The basis covectors are
orthonormal, so the trace of a (p, p) grade is the trace of its matrix and
evaluation on vectors uses p x p minors:

    alpha((x_1..x_p), (y_1..y_q)) = sum a[I, J] det(x[:, I]) det(y[:, J]).

Dimensions here are small (<= 6), so dense tables are used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import InvalidArgument, InvalidModel
from .mc import chunk_generators


@lru_cache(maxsize=None)
def multi_indices(dim: int, p: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(dim), p))


@lru_cache(maxsize=None)
def _index_lookup(dim: int, p: int) -> dict:
    return {idx: pos for pos, idx in enumerate(multi_indices(dim, p))}


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def wedge_table(dim: int, p: int, r: int) -> np.ndarray:
    """Signs T[I, K, M] with e^I ^ e^K = sum_M T[I, K, M] e^M."""
    rows = multi_indices(dim, p)
    cols = multi_indices(dim, r)
    out_lookup = _index_lookup(dim, p + r) if p + r <= dim else {}
    table = np.zeros((len(rows), len(cols), max(len(out_lookup), 1)))
    if p + r > dim:
        return table[:, :, :0]
    for a, I in enumerate(rows):
        for b, K in enumerate(cols):
            if set(I) & set(K):
                continue
            merged = I + K
            table[a, b, out_lookup[tuple(sorted(merged))]] = _perm_sign(merged)
    return table


@lru_cache(maxsize=None)
def _interior_entries(dim: int, p: int):
    """Sparse pattern of the interior product Lambda^p -> Lambda^{p-1}.

    Returns arrays (out_row, in_row, var, sign): i_v e^I picks up
    sign * v[var] on e^{I minus var}.
    """
    lookup = _index_lookup(dim, p - 1)
    out_rows, in_rows, var, sign = [], [], [], []
    for a, I in enumerate(multi_indices(dim, p)):
        for s, i in enumerate(I):
            rest = I[:s] + I[s + 1:]
            out_rows.append(lookup[rest])
            in_rows.append(a)
            var.append(i)
            sign.append((-1) ** s)
    return (np.array(out_rows, dtype=int), np.array(in_rows, dtype=int),
            np.array(var, dtype=int), np.array(sign, dtype=float))


def interior_matrix(v: np.ndarray, p: int) -> np.ndarray:
    """Matrix of i_v : Lambda^p -> Lambda^{p-1} in the multi-index bases."""
    v = np.asarray(v, dtype=float)
    dim = v.shape[0]
    out = np.zeros((math.comb(dim, p - 1), math.comb(dim, p)))
    rows, cols, var, sign = _interior_entries(dim, p)
    np.add.at(out, (rows, cols), sign * v[var])
    return out


def compound_matrix(B: np.ndarray, p: int) -> np.ndarray:
    """p-th compound of an n x m matrix: entries det(B[I, J]) over p-subsets."""
    n, m = B.shape
    rows = multi_indices(n, p)
    cols = multi_indices(m, p)
    if p == 0:
        return np.ones((1, 1))
    out = np.empty((len(rows), len(cols)))
    for a, I in enumerate(rows):
        sub = B[list(I), :]
        for b, J in enumerate(cols):
            out[a, b] = np.linalg.det(sub[:, list(J)])
    return out


class DoubleForm:
    """Element of Lambda^{*,*}(V) for V = R^dim with the standard inner product.

    Grades absent from ``grades`` are zero.  Supports ``+``, ``-``, scalar
    multiplication, the double-wedge product via ``*`` and integer powers.
    """

    __slots__ = ("dim", "grades")

    def __init__(self, dim: int, grades: dict | None = None):
        if dim < 1:
            raise InvalidArgument("dimension must be positive")
        self.dim = int(dim)
        self.grades: dict[tuple[int, int], np.ndarray] = {}
        for (p, q), coef in (grades or {}).items():
            if not (0 <= p <= dim and 0 <= q <= dim):
                raise InvalidArgument(f"grade ({p}, {q}) exceeds dimension {dim}")
            coef = np.array(coef, dtype=float)
            shape = (math.comb(dim, p), math.comb(dim, q))
            if coef.shape != shape:
                raise InvalidArgument(f"grade ({p}, {q}) needs shape {shape}, got {coef.shape}")
            self.grades[(p, q)] = coef

    # constructors
    @classmethod
    def scalar(cls, dim: int, value: float = 1.0) -> DoubleForm:
        return cls(dim, {(0, 0): [[value]]})

    @classmethod
    def identity(cls, dim: int) -> DoubleForm:
        """The metric viewed as sum_i e^i (x) e^i in Lambda^{1,1}."""
        return cls(dim, {(1, 1): np.eye(dim)})

    @classmethod
    def from_matrix(cls, matrix) -> DoubleForm:
        """Grade-(1,1) form with coefficient matrix ``matrix[i, j]``."""
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix.shape[0], {(1, 1): matrix})

    @classmethod
    def basis(cls, dim: int, I, J, value: float = 1.0) -> DoubleForm:
        """value * e^I (x) e^J for increasing index tuples I, J (0-based)."""
        I, J = tuple(I), tuple(J)
        if list(I) != sorted(set(I)) or list(J) != sorted(set(J)):
            raise InvalidArgument("basis multi-indices must be strictly increasing")
        coef = np.zeros((math.comb(dim, len(I)), math.comb(dim, len(J))))
        coef[_index_lookup(dim, len(I))[I], _index_lookup(dim, len(J))[J]] = value
        return cls(dim, {(len(I), len(J)): coef})

    # algebra
    def component(self, p: int, q: int) -> np.ndarray:
        if (p, q) in self.grades:
            return self.grades[(p, q)]
        return np.zeros((math.comb(self.dim, p), math.comb(self.dim, q)))

    def _check(self, other: DoubleForm):
        if not isinstance(other, DoubleForm):
            raise InvalidArgument("expected a DoubleForm")
        if other.dim != self.dim:
            raise InvalidArgument(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        out = {k: v.copy() for k, v in self.grades.items()}
        for k, v in other.grades.items():
            out[k] = out[k] + v if k in out else v.copy()
        return DoubleForm(self.dim, out)

    def __neg__(self):
        return DoubleForm(self.dim, {k: -v for k, v in self.grades.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DoubleForm):
            return double_wedge(self, other)
        return DoubleForm(self.dim, {k: v * float(other) for k, v in self.grades.items()})

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            raise InvalidArgument("negative powers are undefined")
        out = DoubleForm.scalar(self.dim)
        for _ in range(k):
            out = double_wedge(out, self)
        return out

    def allclose(self, other: DoubleForm, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        self._check(other)
        keys = set(self.grades) | set(other.grades)
        return all(np.allclose(self.component(*k), other.component(*k), rtol=rtol, atol=atol)
                   for k in keys)

    def __repr__(self):
        return f"DoubleForm(dim={self.dim}, grades={sorted(self.grades)})"


def wedge_coefficients(a: np.ndarray, b: np.ndarray, dim: int, pq, rs) -> np.ndarray:
    """Double-wedge of coefficient arrays, broadcasting over leading axes."""
    (p, q), (r, s) = pq, rs
    t1 = wedge_table(dim, p, r)
    t2 = wedge_table(dim, q, s)
    return np.einsum("...ij,...kl,ikm,jln->...mn", a, b, t1, t2, optimize=True)


def double_wedge(a: DoubleForm, b: DoubleForm) -> DoubleForm:
    """(alpha (x) beta) . (gamma (x) delta) = (alpha ^ gamma) (x) (beta ^ delta)."""
    a._check(b)
    dim = a.dim
    out: dict[tuple[int, int], np.ndarray] = {}
    for (p, q), ca in a.grades.items():
        for (r, s), cb in b.grades.items():
            if p + r > dim or q + s > dim:
                continue
            prod = wedge_coefficients(ca, cb, dim, (p, q), (r, s))
            key = (p + r, q + s)
            out[key] = out[key] + prod if key in out else prod
    return DoubleForm(dim, out)


def trace_full(a: DoubleForm) -> float:
    """Sum over square grades of <alpha, beta>; off-diagonal grades contribute 0."""
    return float(sum(np.trace(c) for (p, q), c in a.grades.items() if p == q))


def eta(a: DoubleForm, v) -> DoubleForm:
    """Interior product with v in the first slot."""
    v = np.asarray(v, dtype=float)
    out = {}
    for (p, q), c in a.grades.items():
        if p == 0:
            continue
        out[(p - 1, q)] = interior_matrix(v, p) @ c
    return DoubleForm(a.dim, out)


def eta_prime(a: DoubleForm, v) -> DoubleForm:
    """Interior product with v in the second slot."""
    v = np.asarray(v, dtype=float)
    out = {}
    for (p, q), c in a.grades.items():
        if q == 0:
            continue
        out[(p, q - 1)] = c @ interior_matrix(v, q).T
    return DoubleForm(a.dim, out)


def contraction(a: DoubleForm, basis) -> DoubleForm:
    """C_L alpha = sum_i eta_{b_i} eta'_{b_i} alpha over an orthonormal basis of L.

    ``basis`` is a dim x l array whose columns are orthonormal.
    """
    basis = np.asarray(basis, dtype=float)
    out = DoubleForm(a.dim)
    for i in range(basis.shape[1]):
        out = out + eta(eta_prime(a, basis[:, i]), basis[:, i])
    return out


def restrict(a: DoubleForm, basis) -> DoubleForm:
    """Restriction of alpha to L, expressed in the orthonormal basis of L."""
    basis = np.asarray(basis, dtype=float)
    l = basis.shape[1]
    out = {}
    for (p, q), c in a.grades.items():
        if p > l or q > l:
            continue
        out[(p, q)] = compound_matrix(basis, p).T @ c @ compound_matrix(basis, q)
    return DoubleForm(l, out)


def trace_on(a: DoubleForm, basis) -> float:
    """Tr^L(alpha|_L)."""
    basis = np.asarray(basis, dtype=float)
    if basis.shape[1] == 0:
        return float(a.component(0, 0)[0, 0])
    return trace_full(restrict(a, basis))


def orthonormal_basis(vectors, tol: float = 1e-10) -> np.ndarray:
    """Gram-Schmidt on the columns of ``vectors``; columns below ``tol`` are dropped."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    kept = []
    for col in vectors.T:
        w = col.copy()
        for _ in range(2):
            for q in kept:
                w = w - (q @ w) * q
        norm = np.linalg.norm(w)
        if norm > tol:
            kept.append(w / norm)
    if not kept:
        return np.zeros((vectors.shape[0], 0))
    return np.column_stack(kept)


def orthogonal_complement(basis, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the complement of span(basis) (columns)."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    dim = basis.shape[0]
    full = orthonormal_basis(np.hstack([basis, np.eye(dim)]), tol)
    return full[:, basis.shape[1]:]


def minors(xs: np.ndarray, p: int) -> np.ndarray:
    """All p x p minors det(xs[..., :, I]) of stacked p x dim matrices."""
    dim = xs.shape[-1]
    idx = multi_indices(dim, p)
    if p == 0:
        return np.ones(xs.shape[:-2] + (1,))
    sub = np.stack([xs[..., :, list(I)] for I in idx], axis=-3)
    return np.linalg.det(sub)


def evaluate(a: DoubleForm, xs, ys) -> np.ndarray:
    """alpha((x_1..x_p), (y_1..y_q)) for stacked vectors.

    ``xs`` has shape (..., p, dim) and ``ys`` (..., q, dim); only the grade
    (p, q) component contributes.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    p, q = xs.shape[-2], ys.shape[-2]
    c = a.component(p, q)
    return np.einsum("...i,ij,...j->...", minors(xs, p), c, minors(ys, q))


# --------------------------------------------------------------------------
# Gaussian double forms


@dataclass
class GaussianDoubleFormModel:
    """Gaussian law on grade-(1,1) double forms.

    ``entry_cov`` is the covariance of the flattened (row-major) coefficient
    matrix of W; ``cov`` is the induced C = E[(W - E W)^2] in Lambda^{2,2}.
    Build instances with :meth:`from_entry_covariance` so the two agree.
    """

    dim: int
    mean: DoubleForm
    cov: DoubleForm
    entry_cov: np.ndarray
    _factor: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.dim
        if set(self.mean.grades) - {(1, 1)}:
            raise InvalidModel("mean must be of grade (1, 1)")
        if set(self.cov.grades) - {(2, 2)}:
            raise InvalidModel("cov must be of grade (2, 2)")
        self.entry_cov = np.asarray(self.entry_cov, dtype=float)
        if self.entry_cov.shape != (n * n, n * n):
            raise InvalidModel("entry covariance must be dim^2 x dim^2")
        sym = 0.5 * (self.entry_cov + self.entry_cov.T)
        vals, vecs = np.linalg.eigh(sym)
        scale = max(1.0, float(np.max(np.abs(vals))))
        if vals.min() < -1e-10 * scale:
            raise InvalidModel(f"entry covariance is not PSD (min eigenvalue {vals.min():.3e})")
        self._factor = vecs * np.sqrt(np.clip(vals, 0.0, None))
        induced = induced_square_covariance(sym, n)
        if n >= 2 and not np.allclose(induced, self.cov.component(2, 2), atol=1e-10, rtol=1e-10):
            raise InvalidModel("cov does not match the entry covariance")

    @classmethod
    def from_entry_covariance(cls, mean: DoubleForm, entry_cov) -> GaussianDoubleFormModel:
        n = mean.dim
        entry_cov = np.asarray(entry_cov, dtype=float)
        cov = DoubleForm(n, {(2, 2): induced_square_covariance(entry_cov, n)} if n >= 2 else {})
        return cls(n, mean, cov, entry_cov)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, rank: int | None = None) -> GaussianDoubleFormModel:
        mean = DoubleForm.from_matrix(rng.normal(size=(dim, dim)))
        factor = rng.normal(size=(dim * dim, rank or dim * dim)) / math.sqrt(dim)
        return cls.from_entry_covariance(mean, factor @ factor.T)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Coefficient matrices of ``size`` independent draws, shape (size, dim, dim)."""
        z = rng.standard_normal((size, self._factor.shape[1]))
        flat = z @ self._factor.T
        return self.mean.component(1, 1) + flat.reshape(size, self.dim, self.dim)


def induced_square_covariance(entry_cov: np.ndarray, dim: int) -> np.ndarray:
    """E[(W - E W)^2] from the covariance of W's coefficient entries."""
    if dim < 2:
        return np.zeros((0, 0))
    t = wedge_table(dim, 1, 1)
    s = np.asarray(entry_cov).reshape(dim, dim, dim, dim)
    return np.einsum("ikm,jln,ijkl->mn", t, t, s, optimize=True)


def gaussian_moment_rhs(model: GaussianDoubleFormModel, k: int) -> DoubleForm:
    """Closed-form k-th moment sum_j k!/((k-2j)! j! 2^j) mu^{k-2j} C^j."""
    if k < 1:
        raise InvalidArgument("moment order must be >= 1")
    out = DoubleForm(model.dim)
    for j in range(k // 2 + 1):
        coef = math.factorial(k) / (math.factorial(k - 2 * j) * math.factorial(j) * 2**j)
        out = out + coef * (model.mean ** (k - 2 * j)) * (model.cov ** j)
    return out


def gaussian_moment_mc(model: GaussianDoubleFormModel, k: int, n_samples: int, seed: int,
               chunk_size: int = 100_000) -> tuple[DoubleForm, np.ndarray]:
    """Monte Carlo estimate of E[W^k] and per-coefficient standard errors."""
    if k < 1:
        raise InvalidArgument("moment order must be >= 1")
    n = model.dim
    shape = (math.comb(n, k), math.comb(n, k)) if k <= n else (0, 0)
    if k > n:
        return DoubleForm(n), np.zeros(shape)
    total = np.zeros(shape)
    total_sq = np.zeros(shape)
    for rng, size in chunk_generators(seed, n_samples, chunk_size):
        w = model.sample(rng, size)
        power = w
        for m in range(1, k):
            power = wedge_coefficients(power, w, n, (m, m), (1, 1))
        total += power.sum(axis=0)
        total_sq += np.square(power).sum(axis=0)
    mean = total / n_samples
    var = np.maximum(total_sq / n_samples - mean**2, 0.0) * n_samples / max(n_samples - 1, 1)
    return DoubleForm(n, {(k, k): mean}), np.sqrt(var / n_samples)


@dataclass(frozen=True)
class ConditionalTraceResult:
    mc_value: float
    rhs_value: float
    se: float


def conditional_trace_rhs(alpha: DoubleForm, v0, c) -> float:
    """k! Tr^{v0perp}(alpha|_{v0perp}) + sum_l eta_{c_l v0} eta'_{c_l v0} C_{v0perp}^{k-1} alpha."""
    v0 = np.asarray(v0, dtype=float)
    c = np.asarray(c, dtype=float)
    k = len(c)
    perp = orthogonal_complement(v0[:, None])
    first = math.factorial(k) * trace_on(alpha, perp)
    contracted = alpha
    for _ in range(k - 1):
        contracted = contraction(contracted, perp)
    second = 0.0
    for cl in c:
        term = eta(eta_prime(contracted, cl * v0), cl * v0)
        second += float(term.component(0, 0)[0, 0])
    return first + second


def conditional_trace_check(alpha: DoubleForm, v0, c, n_samples: int, seed: int,
                chunk_size: int = 200_000) -> ConditionalTraceResult:
    """Conditional expectation of alpha((X_1..X_k),(X_1..X_k)) given <X_i, v0> = c_i.

    The Monte Carlo side samples the exact conditional law X_i = c_i v0 + Y_i,
    Y_i standard Gaussian on the orthogonal complement of v0.
    """
    v0 = np.asarray(v0, dtype=float)
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if abs(np.linalg.norm(v0) - 1.0) > 1e-12:
        raise InvalidArgument("v0 must be a unit vector")
    k = len(c)
    grades = set(alpha.grades)
    if grades and grades != {(k, k)}:
        raise InvalidArgument(f"alpha must have grade ({k}, {k}) to match len(c)")
    if k > alpha.dim:
        raise InvalidArgument("grade exceeds dimension")
    dim = alpha.dim
    proj = np.eye(dim) - np.outer(v0, v0)
    total = total_sq = 0.0
    for rng, size in chunk_generators(seed, n_samples, chunk_size):
        y = rng.standard_normal((size, k, dim)) @ proj
        x = y + c[None, :, None] * v0[None, None, :]
        vals = evaluate(alpha, x, x)
        total += vals.sum()
        total_sq += np.square(vals).sum()
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0) * n_samples / max(n_samples - 1, 1)
    return ConditionalTraceResult(float(mean), conditional_trace_rhs(alpha, v0, c), math.sqrt(var / n_samples))
