"""Command-line interface: table, oracle, simulate and selftest.

Every command writes a versioned header (``# gkf-kit v1``) followed by the
resolved configuration, so a rerun with the same configuration reproduces
the output byte for byte (pass ``--no-timestamp`` to drop the only varying
line).  Exit codes: 0 success or agreement, 1 statistical disagreement,
2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import gmf as G
from .errors import (FitUnstable, GkfError, ProjectionFailure, SeriesError, WindowTooNarrow)
from .gkf import family_domain, family_gmf

SCHEMA = "gkf-kit v1"
EXIT_OK, EXIT_DISAGREE, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
Z_LIMIT = 3.0
TABLE_FAMILIES = ("gaussian", "chi2", "noncentral-chi2", "f", "conjunction")
ORACLE_DOMAINS = ("half-space", "chi", "noncentral-chi", "f", "conjunction")
NUMERIC_ERRORS = (FitUnstable, SeriesError, WindowTooNarrow, ProjectionFailure)


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# config and output


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, blank lines are skipped."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def apply_config(parser: argparse.ArgumentParser, values: dict[str, str]):
    """Install config-file values as parser defaults so flags still win."""
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, text in values.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        convert = action.type or str
        try:
            if action.nargs in ("+", "*"):
                value = [convert(t) for t in text.replace(",", " ").split()]
            elif action.const is True and action.nargs == 0:
                value = text.lower() in ("1", "true", "yes", "on")
            else:
                value = convert(text)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.choices is not None:
            bad = [v for v in (value if isinstance(value, list) else [value]) if v not in action.choices]
            if bad:
                raise UsageError(f"config key {key!r}: invalid choice {bad[0]!r}")
        defaults[key] = value
        action.required = False
    parser.set_defaults(**defaults)


def fmt(x) -> str:
    """Locale-independent text for a number or other value."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (list, tuple)):
        return " ".join(fmt(v) for v in x)
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def resolved_config(args) -> dict:
    # threads never change results, so they stay out of the reproducible header
    skip = {"func", "config", "output", "no_timestamp", "histogram", "threads"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    if not args.no_timestamp:
        cfg["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return cfg


def render(args, columns: list[str], rows: list[dict], extra: dict | None = None) -> str:
    cfg = resolved_config(args)
    if args.format == "json":
        doc = {"schema": SCHEMA, "config": cfg, "columns": columns,
               "rows": [{c: r.get(c) for c in columns} for r in rows]}
        if extra:
            doc.update(extra)
        return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# {SCHEMA}\n")
    for k, v in cfg.items():
        buf.write(f"# {k} = {fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def emit(args, text: str, path: str | None = None):
    path = path or args.output
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _threads(text: str):
    if text == "auto":
        return text
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'")
    return value


def _default_seed() -> int:
    text = os.environ.get("GKF_SEED")
    if text is None:
        return 0
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"GKF_SEED must be an integer, got {text!r}") from None


# --------------------------------------------------------------------------
# commands


def family_params(args) -> dict:
    fam = args.family
    if fam == "chi2":
        return {"k": args.k}
    if fam == "noncentral-chi2":
        return {"k": args.k, "alpha": args.alpha}
    if fam == "f":
        return {"k1": args.k1, "k2": args.k2}
    if fam == "conjunction":
        if args.rho is None:
            raise UsageError("family conjunction needs --rho")
        return {"rho": args.rho}
    return {}


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={fmt(v)}" for k, v in params.items())


def cmd_table(args) -> int:
    params = family_params(args)
    if args.family == "conjunction":
        params["apex"] = args.apex
    rows = []
    for u in args.levels:
        series = family_gmf(args.family, u, max(args.orders), **params)
        for j in args.orders:
            rows.append({"family": args.family, "params": _params_text(params), "u": u, "j": j,
                         "ec_density": (2 * math.pi) ** (-j / 2) * series[j],
                         "gmf_coefficient": series[j]})
    cols = ["family", "params", "u", "j", "ec_density", "gmf_coefficient"]
    emit(args, render(args, cols, rows))
    return EXIT_OK


def oracle_domain(args, apex: str = "derived"):
    d = args.domain
    if d == "half-space":
        return family_domain("gaussian", args.u)
    if d == "chi":
        return G.BallComplement(args.k, args.radius)
    if d == "noncentral-chi":
        center = np.zeros(args.k)
        center[0] = math.sqrt(args.alpha)
        return G.NoncentralBallComplement(args.k, center, args.radius)
    if d == "f":
        return G.FRegion(args.k1, args.k2, args.u)
    if args.rho is None:
        raise UsageError("domain conjunction needs --rho")
    return G.conjunction_cone_params(args.u, args.rho, apex)


def _oracle_radii(args) -> np.ndarray:
    if args.radii:
        return np.asarray(args.radii, dtype=float)
    if args.n_radii < 1:
        raise UsageError("--n-radii must be positive")
    return np.linspace(0.0, args.r_max, args.n_radii)


def cmd_oracle(args) -> int:
    from .tube_oracle import fit_tube_coefficients, tube_curve

    J = args.order
    domain = oracle_domain(args)
    rows = []
    extra = {}
    if isinstance(domain, G.FRegion):
        # the F region has a cusp (critical radius 0), so only the coarea route applies
        if J > 2:
            raise UsageError("the F region oracle covers orders up to 2")
        est = G.gmf_m1_m2_coarea(domain, args.epsilon, args.samples, args.seed,
                                 threads=args.threads)
        closed = G.gmf(domain, 2).coeffs
        for j, (m, se) in enumerate([(est.M1, est.M1_se), (est.M2, est.M2_se)], start=1):
            if j <= J:
                rows.append({"apex": "", "method": "coarea", "j": j, "closed_form": closed[j],
                             "fitted": m, "std_error": se, "z": (m - closed[j]) / se})
    else:
        radii = _oracle_radii(args)
        if radii.size < 2:
            raise UsageError("the oracle needs more than one radius")
        curve = tube_curve(domain, radii, args.samples, args.seed, threads=args.threads)
        fit = fit_tube_coefficients(curve, J, args.guard)
        readings = ["derived", "printed"] if args.domain == "conjunction" else [""]
        for reading in readings:
            ref = (G.gmf_cone2(oracle_domain(args, reading), J) if reading
                   else G.gmf(domain, J)).coeffs
            z = fit.z_scores(ref)
            for j in range(J + 1):
                rows.append({"apex": reading, "method": "tube", "j": j, "closed_form": ref[j],
                             "fitted": fit.coefficients[j], "std_error": fit.std_errors[j],
                             "z": z[j]})
        extra = {"curve": curve.to_dict(), "fit": fit.to_dict()}
    asserted = [r for r in rows if r["apex"] in ("", "derived")]
    agree = all(abs(r["z"]) <= Z_LIMIT for r in asserted)
    for r in rows:
        r["agrees"] = abs(r["z"]) <= Z_LIMIT
    cols = ["apex", "method", "j", "closed_form", "fitted", "std_error", "z", "agrees"]
    emit(args, render(args, cols, rows, extra))
    return EXIT_OK if agree else EXIT_DISAGREE


def cmd_simulate(args) -> int:
    from .experiments import simulate

    params = family_params(args)
    res = simulate(args.family, args.levels, n=args.n, spacing=args.spacing, scale=args.scale,
                   topology=args.topology, replicates=args.replicates, seed=args.seed,
                   threads=args.threads, mu2_source=args.mu2, stencil=args.mu2_stencil, **params)
    rows = [{"u": lv.level, "predicted": lv.predicted, "mean_chi": lv.mean_chi, "se": lv.se,
             "z": lv.z, "relative_error": lv.relative_error,
             "mu2_used": res.mu2_used, "mu2_hat": res.mu2_hat} for lv in res.levels]
    cols = ["u", "predicted", "mean_chi", "se", "z", "relative_error", "mu2_used", "mu2_hat"]
    hist_rows = [{"u": lv.level, "chi": chi, "count": count}
                 for lv in res.levels for chi, count in lv.histogram.items()]
    extra = {"histogram": hist_rows} if args.format == "json" else None
    emit(args, render(args, cols, rows, extra))
    if args.histogram:
        emit(args, render(args, ["u", "chi", "count"], hist_rows), args.histogram)
    return EXIT_OK if all(abs(lv.z) <= Z_LIMIT for lv in res.levels) else EXIT_DISAGREE


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    tag = None if args.tag == "all" else args.tag
    buf = io.StringIO()
    results = run_all(tag, args.criteria, seed=args.seed, threads=args.threads, stream=buf)
    emit(args, buf.getvalue())
    return EXIT_OK if all(r.passed for r in results) else EXIT_DISAGREE


# --------------------------------------------------------------------------
# parser


def _add_family_params(p):
    p.add_argument("--k", type=int, default=1, help="degrees of freedom (chi2, noncentral-chi2)")
    p.add_argument("--alpha", type=float, default=0.0, help="noncentrality ||mu||^2")
    p.add_argument("--k1", type=int, default=2, help="numerator degrees of freedom (f)")
    p.add_argument("--k2", type=int, default=2, help="denominator degrees of freedom (f)")
    p.add_argument("--rho", type=float, default=None, help="correlation of the conjunction pair")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'key = value' file; flags override it")
    common.add_argument("--seed", type=int, default=None, help="default: $GKF_SEED or 0")
    common.add_argument("--threads", type=_threads, default=1, help="worker cap, or 'auto'")
    common.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--no-timestamp", action="store_true", help="omit the header timestamp")

    parser = argparse.ArgumentParser(prog="gkf-kit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="EC densities and tube coefficients")
    p.add_argument("--family", required=True, choices=TABLE_FAMILIES)
    _add_family_params(p)
    p.add_argument("--apex", choices=("derived", "printed"), default="derived",
                   help="conjunction cone apex reading")
    p.add_argument("--levels", type=float, nargs="+", required=True)
    p.add_argument("--orders", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("oracle", parents=[common], help="closed forms against Monte Carlo tubes")
    p.add_argument("--domain", required=True, choices=ORACLE_DOMAINS)
    _add_family_params(p)
    p.add_argument("--u", type=float, default=1.0, help="level (half-space, f, conjunction)")
    p.add_argument("--radius", type=float, default=2.0, help="ball radius (chi, noncentral-chi)")
    p.add_argument("--order", type=int, default=2, help="highest order J")
    p.add_argument("--radii", type=float, nargs="+", default=None, help="explicit tube radii")
    p.add_argument("--r-max", type=float, default=0.25)
    p.add_argument("--n-radii", type=int, default=16)
    p.add_argument("--guard", type=int, default=2, help="extra polynomial degrees in the fit")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--epsilon", type=float, default=0.01, help="coarea window half-width")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", parents=[common], help="simulated mean Euler characteristic")
    p.add_argument("--family", required=True, choices=TABLE_FAMILIES)
    _add_family_params(p)
    p.add_argument("--levels", type=float, nargs="+", required=True)
    p.add_argument("--n", type=int, default=256, help="grid points per axis")
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--scale", type=float, default=8.0, help="covariance scale s")
    p.add_argument("--topology", choices=("torus", "rectangle"), default="torus")
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--mu2", choices=("empirical", "analytic"), default="empirical")
    p.add_argument("--mu2-stencil", choices=("forward", "central"), default="forward")
    p.add_argument("--histogram", default=None, help="write the chi histogram CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    p.add_argument("--tag", choices=("fast", "slow", "all"), default="fast")
    p.add_argument("--criteria", type=int, nargs="+", default=None)
    p.set_defaults(func=cmd_selftest)
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices.get(name)
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("command", nargs="?")
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        sub = _subparser(parser, known.command) if known.command else None
        if known.config and sub is not None:
            apply_config(sub, read_config(known.config))
        args = parser.parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, OSError) as exc:
        print(f"gkf-kit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"gkf-kit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except GkfError as exc:
        print(f"gkf-kit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
