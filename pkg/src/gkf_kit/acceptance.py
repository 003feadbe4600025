"""Acceptance suite: one pass/fail line per criterion.

Each criterion is a function returning a :class:`CriterionResult`.  Criteria
tagged ``fast`` finish in seconds and make up the ``selftest`` command; the
``slow`` ones run Monte Carlo at full size.  A criterion with a runtime
budget fails when the budget is exceeded.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import gmf as G
from .double_forms import DoubleForm, GaussianDoubleFormModel, conditional_trace_check, gaussian_moment_mc, gaussian_moment_rhs
from .euler_char import euler_char_2d, euler_char_oracle
from .experiments import simulate
from .lkc import lkc_box, lkc_from_minkowski, steiner_tube_volume_box
from .numdiff import richardson
from .special_fn import chi_density, gaussian_tail, noncentral_chi_upper_tail
from .tube_oracle import TubeCurve, fit_exact_curve, fit_tube_coefficients, tube_curve

MC_SAMPLES = 10_000_000
TUBE_RADII = np.linspace(0.0, 0.25, 16)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float | None = None
    diagnostics: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" (budget {self.budget:g}s)" if self.budget is not None else ""
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} [{self.seconds:.1f}s{budget}]"


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    tag: str
    budget: float | None
    func: object

    def run(self, seed: int = 0, threads=1) -> CriterionResult:
        t0 = time.perf_counter()
        ok, detail, diag = self.func(seed=seed, threads=threads)
        dt = time.perf_counter() - t0
        over = self.budget is not None and dt > self.budget
        if over:
            detail += f"; runtime {dt:.1f}s over budget"
        return CriterionResult(self.number, self.name, bool(ok) and not over, detail, dt,
                               self.budget, diag)


CRITERIA: list[Criterion] = []


def criterion(number: int, name: str, tag: str, budget: float | None = None):
    def register(func):
        CRITERIA.append(Criterion(number, name, tag, budget, func))
        return func
    return register


def _relative_error(value: float, ref: float, floor: float) -> float:
    """Relative error, or absolute error when the reference vanishes."""
    return abs(value - ref) / (abs(ref) if abs(ref) > floor else 1.0)


# --------------------------------------------------------------------------
# criteria


@criterion(1, "half-space exactness", "fast", 1.0)
def half_space_exactness(seed=0, threads=1):
    import mpmath

    radii = np.linspace(0.0, 0.25, 20)
    worst = 0.0
    diag = []
    for u in (0.0, 1.0, 2.0):
        fit = fit_exact_curve(lambda r, u=u: mpmath.ncdf(r - u), radii, 4)
        ref = G.gmf_half_space(u, 4).coeffs
        errs = [_relative_error(fit.coefficients[j], ref[j], 1e-12) for j in range(5)]
        worst = max(worst, max(errs))
        diag.append(f"u={u:g}: max rel err {max(errs):.2e}")
    # the double-precision fit is reported for reference only
    dbl = fit_tube_coefficients(TubeCurve.exact(radii, lambda x: gaussian_tail(1.0 - x)), 4, guard=6)
    ref = G.gmf_half_space(1.0, 4).coeffs
    diag.append("double-precision fit, u=1: max rel err "
                f"{max(_relative_error(dbl.coefficients[j], ref[j], 1e-12) for j in range(5)):.2e}")
    return worst < 1e-8, f"max relative error {worst:.2e} (< 1e-8)", diag


@criterion(2, "chi derivative identity", "fast", 1.0)
def chi_derivative_identity(seed=0, threads=1):
    worst = 0.0
    for k in (2, 3):
        for x in (1.0, 1.5, 2.0):
            M = G.gmf_chi(k, x, 3).coeffs
            for j in (1, 2, 3):
                fd = richardson(lambda t: chi_density(k, t), x, 1e-2, j - 1, 3)
                worst = max(worst, abs(M[j] - (-1) ** (j - 1) * fd))
    return worst < 1e-6, f"max |M_j - FD| {worst:.2e} (< 1e-6)", []


def _tube_check(domain, J, seed, threads, orders, ref=None):
    curve = tube_curve(domain, TUBE_RADII, MC_SAMPLES, seed, threads=threads)
    fit = fit_tube_coefficients(curve, J)
    ref = G.gmf(domain, J).coeffs if ref is None else ref
    z = fit.z_scores(ref)
    return max(abs(z[j]) for j in orders), z


@criterion(3, "MC tube oracle, chi domain", "slow", 60.0)
def tube_oracle_chi(seed=0, threads=1):
    zmax, z = _tube_check(G.BallComplement(2, 2.0), 2, seed, threads, (1, 2))
    return zmax <= 3, f"|z| for M_1, M_2 = {abs(z[1]):.2f}, {abs(z[2]):.2f} (<= 3)", []


@criterion(4, "noncentral chi", "slow")
def noncentral_chi(seed=0, threads=1):
    k, alpha, x = 2, 1.0, 2.0
    M = G.gmf_noncentral_chi(k, alpha, x, 2, 1e-12).coeffs
    tail = lambda t: noncentral_chi_upper_tail(k, alpha, t)
    fd = [-richardson(tail, x, 1e-2, 1, 3), richardson(tail, x, 1e-2, 2, 3)]
    fd_err = max(abs(M[1] - fd[0]), abs(M[2] - fd[1]))
    center = np.array([math.sqrt(alpha), 0.0])
    zmax, z = _tube_check(G.NoncentralBallComplement(k, center, x), 2, seed, threads, (1, 2))
    ok = fd_err < 1e-5 and zmax <= 3
    return ok, f"FD error {fd_err:.2e} (< 1e-5); MC |z| {abs(z[1]):.2f}, {abs(z[2]):.2f} (<= 3)", []


@criterion(5, "F field", "slow")
def f_field(seed=0, threads=1):
    k1 = k2 = 2
    u = 1.0
    a = G.gmf_f_field(k1, k2, u, 2).coeffs
    b = G.gmf_f_field_surface(k1, k2, u, 2).coeffs
    closed_err = max(abs(a[1] - b[1]), abs(a[2] - b[2]))
    est = G.gmf_m1_m2_coarea(G.FRegion(k1, k2, u), 0.01, MC_SAMPLES, seed, threads=threads)
    z1 = (est.M1 - a[1]) / est.M1_se
    z2 = (est.M2 - a[2]) / est.M2_se
    ok = closed_err < 1e-10 and max(abs(z1), abs(z2)) <= 3
    return ok, (f"closed forms differ by {closed_err:.1e} (< 1e-10); "
                f"coarea |z| {abs(z1):.2f}, {abs(z2):.2f} (<= 3)"), []


@criterion(6, "cone / conjunction", "slow")
def cone_conjunction(seed=0, threads=1):
    worst = 0.0
    diag = []
    for rho in (-0.5, 0.0, 0.5):
        for u in (1.0, 2.0):
            cone = G.conjunction_cone_params(u, rho, "derived")
            curve = tube_curve(cone, TUBE_RADII, MC_SAMPLES, seed, threads=threads)
            fit = fit_tube_coefficients(curve, 2)
            z = fit.z_scores(G.gmf_cone2(cone, 2).coeffs)
            zp = fit.z_scores(G.gmf_conjunction(u, rho, 2, "printed").coeffs)
            worst = max(worst, float(np.max(np.abs(z))))
            diag.append(f"rho={rho:+.1f} u={u:g}: derived z {np.round(z, 2).tolist()}, "
                        f"printed apex z {np.round(zp, 2).tolist()}")
    return worst <= 3, f"max |z| over 6 cones, orders 0..2: {worst:.2f} (<= 3)", diag


def _sim_line(res) -> str:
    return ", ".join(f"u={lv.level:g}: {lv.mean_chi:.3f} vs {lv.predicted:.3f} (z {lv.z:+.2f})"
                     for lv in res.levels)


@criterion(7, "end-to-end, Gaussian field", "slow", 600.0)
def end_to_end_gaussian(seed=0, threads=1):
    torus = simulate("gaussian", [1.5, 2.0, 2.5], replicates=2000, seed=seed, threads=threads)
    rect = simulate("gaussian", [2.0], topology="rectangle", replicates=2000, seed=seed,
                    threads=threads)
    zmax = max(abs(lv.z) for lv in torus.levels + rect.levels)
    rel = abs(torus.levels[1].relative_error)
    central = simulate("gaussian", [1.5, 2.0, 2.5], replicates=2000, seed=seed, threads=threads,
                       stencil="central")
    diag = [f"torus: {_sim_line(torus)}", f"rectangle: {_sim_line(rect)}",
            f"central-difference mu2 (not asserted): {_sim_line(central)}"]
    return zmax <= 3 and rel < 0.05, f"max |z| {zmax:.2f} (<= 3); relative error at u=2 {rel:.2%} (< 5%)", diag


@criterion(8, "end-to-end, chi2_2 field", "slow", 600.0)
def end_to_end_chi2(seed=0, threads=1):
    res = simulate("chi2", [4.0, 6.0], replicates=2000, seed=seed, threads=threads, k=2)
    zmax = max(abs(lv.z) for lv in res.levels)
    return zmax <= 3, f"max |z| {zmax:.2f} (<= 3)", [_sim_line(res)]


def _within(est: np.ndarray, ref: np.ndarray, se: np.ndarray, nsig: float) -> float:
    """Largest |est - ref| / se; exact agreement where se vanishes."""
    diff = np.abs(est - ref)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(ref))) if ref.size else 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(diff <= tol, 0.0, np.inf))
    return float(np.max(z)) if z.size else 0.0


@criterion(9, "double-form moment identity", "slow", 120.0)
def double_form_moments(seed=0, threads=1):
    worst = 0.0
    for i in range(20):
        dim = 2 + i % 2
        k = 1 + i % 3 if dim == 3 else 1 + i % 2
        model = GaussianDoubleFormModel.random(dim, np.random.default_rng([seed, 9, i]))
        est, se = gaussian_moment_mc(model, k, 1_000_000, seed + i)
        ref = gaussian_moment_rhs(model, k).component(k, k)
        worst = max(worst, _within(est.component(k, k), ref, se, 4))
    return worst <= 4, f"max |mc - rhs| / SE over 20 models {worst:.2f} (<= 4)", []


def random_double_form(dim: int, k: int, rng: np.random.Generator) -> DoubleForm:
    n = math.comb(dim, k)
    return DoubleForm(dim, {(k, k): rng.normal(size=(n, n))})


@criterion(10, "conditional trace identity", "slow", 60.0)
def conditional_trace(seed=0, threads=1):
    worst = 0.0
    for i in range(20):
        rng = np.random.default_rng([seed, 10, i])
        k = 1 + i % 2
        alpha = random_double_form(3, k, rng)
        v0 = rng.normal(size=3)
        v0 /= np.linalg.norm(v0)
        res = conditional_trace_check(alpha, v0, rng.normal(size=k), 200_000, seed + i)
        worst = max(worst, abs(res.mc_value - res.rhs_value) / res.se)
    return worst <= 4, f"max |mc - rhs| / SE over 20 cases {worst:.2f} (<= 4)", []


@criterion(11, "Euler characteristic exactness", "fast")
def euler_exactness(seed=0, threads=1):
    rng = np.random.default_rng([seed, 11])
    failures = 0
    for topology in ("rectangle", "torus"):
        for i in range(1000):
            mask = rng.random((16, 16)) < rng.uniform(0.2, 0.8)
            failures += euler_char_2d(mask, topology) != euler_char_oracle(mask, topology)
    return failures == 0, f"{failures} mismatches in 2000 masks", []


@criterion(12, "Steiner oracle", "fast")
def steiner_oracle(seed=0, threads=1):
    worst = 0.0
    for sides in ([1.0, 1.0], [1.0, 1.0, 1.0]):
        n = len(sides)
        r = np.linspace(0.0, 1.0, 2 * n + 3)
        vol = [steiner_tube_volume_box(sides, x) for x in r]
        poly = np.polynomial.polynomial.polyfit(r, vol, n)
        minkowski = poly * np.array([math.factorial(i) for i in range(n + 1)])
        lkc = lkc_from_minkowski(minkowski, n)
        worst = max(worst, float(np.max(np.abs(lkc - lkc_box(sides).values))))
    return worst < 1e-10, f"max |L_j - lkc_box| {worst:.1e} (< 1e-10)", []


def select(tag: str | None = None, numbers=None) -> list[Criterion]:
    out = sorted(CRITERIA, key=lambda c: c.number)
    if tag is not None:
        out = [c for c in out if c.tag == tag]
    if numbers:
        out = [c for c in out if c.number in set(numbers)]
    return out


def run_all(tag: str | None = None, numbers=None, seed: int = 0, threads=1,
            verbose: bool = True, stream=None) -> list[CriterionResult]:
    import sys

    stream = stream or sys.stdout
    results = []
    for c in select(tag, numbers):
        res = c.run(seed, threads)
        results.append(res)
        if verbose:
            print(res.line(), file=stream, flush=True)
            for d in res.diagnostics:
                print(f"       {d}", file=stream, flush=True)
    return results
