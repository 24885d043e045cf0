"""Command-line interface: ``umvue {estimate,table1,verify,efficiency}``.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage or
input, 3 an estimator precondition failed for the given data.
"""

import argparse
import json
import math
import sys
import warnings

from . import beta_est, checks, gamma_est, gseries
from .beta_est import BetaParams
from .errors import (
    ConfigError,
    DegenerateSample,
    DomainError,
    NonConvergence,
    PreconditionError,
)
from .gamma_est import GammaParams
from .numkit import Tolerance

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    """Bad flags or unreadable input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------

def parse_values(text, column=None):
    """Floats from whitespace-separated tokens, or from one comma-separated column.

    ``column`` is 1-based. Blank lines are skipped.
    """
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if column is None:
            tokens = line.split()
        else:
            fields = line.split(",")
            if column > len(fields):
                raise UsageError(f"line {lineno}: no column {column}")
            tokens = [fields[column - 1].strip()]
        for tok in tokens:
            try:
                values.append(float(tok))
            except ValueError:
                raise UsageError(f"line {lineno}: not a number: {tok!r}") from None
    if not values:
        raise UsageError("no data values found")
    return values


def parse_grid(spec):
    """``lo:step:hi`` into a list of grid points."""
    try:
        lo, step, hi = (float(t) for t in spec.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like lo:step:hi, got {spec!r}") from None
    if not (lo > 0 and step > 0) or hi < lo:
        raise UsageError(f"empty or invalid grid {spec!r}")
    return beta_est.table1_grid(lo, step, hi)


def _read_input(args):
    if args.data is not None:
        return args.data
    if args.input is None:
        raise UsageError("estimate needs --input PATH (or - for stdin) or --data")
    if args.input == "-":
        return sys.stdin.read()
    try:
        with open(args.input) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None


def _tolerance(args, default):
    rel = default.rel if args.tol_rel is None else args.tol_rel
    abs_ = default.abs if args.tol_abs is None else args.tol_abs
    try:
        return Tolerance(rel=rel, abs=abs_)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _fmt(value, full):
    if value is None:
        return "unavailable"
    if isinstance(value, float):
        if full or not math.isfinite(value):
            return repr(value)
        return f"{value:.6f}"
    return str(value)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

_GAMMA_NEEDS = {
    "umvue_alpha": "requires n >= 4",
    "umvue_lambda": "requires n >= 4",
    "umvue_inv_alpha": "requires n <= nmax",
    "umvue_inv_lambda": "requires n <= nmax",
}


def _estimate_gamma(values, args):
    n_max = gseries.N_MAX if args.nmax is None else args.nmax
    if not 2 <= n_max <= gseries.N_MAX:
        raise UsageError(f"--nmax must lie in [2, {gseries.N_MAX}]")
    sample = gamma_est.GammaSample(values)
    tbl = None
    if 3 <= sample.n <= n_max:
        tbl = gseries.coeff_table(
            sample.n, y_min=0.5 * gseries.Y_SWITCH, cache_dir=args.cache
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = gamma_est.fit_gamma(sample, tbl, tol=_tolerance(args, Tolerance()), n_max=n_max)
    out = fit.as_dict()
    notes = list(out.pop("variance_finiteness_notes"))
    for key, need in _GAMMA_NEEDS.items():
        if out[key] is None:
            notes.append(f"{key} unavailable: {need}")
    return out, notes


def _estimate_beta(values, args):
    fit = beta_est.fit_beta(beta_est.BetaSample(values))
    return fit.as_dict(), []


def cmd_estimate(args, out):
    values = parse_values(_read_input(args), args.column)
    try:
        if args.dist == "gamma":
            fields, notes = _estimate_gamma(values, args)
        else:
            fields, notes = _estimate_beta(values, args)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        out.write(json.dumps({"dist": args.dist, **fields, "notes": notes}) + "\n")
    elif args.format == "csv":
        out.write("field,value\n")
        for k, v in fields.items():
            out.write(f"{k},{'' if v is None else _fmt(v, args.full_precision)}\n")
    else:
        width = max(len(k) for k in fields)
        for k, v in fields.items():
            out.write(f"{k:<{width}}  {_fmt(v, args.full_precision)}\n")
        for note in notes:
            out.write(f"note: {note}\n")
    return EXIT_OK


def cmd_table1(args, out):
    grid = parse_grid(args.grid)
    tol = _tolerance(args, beta_est.TABLE1_TOL)
    rows = []
    for b in grid:
        try:
            rows += beta_est.table1([b], tol)
        except NonConvergence as exc:
            raise NonConvergence(f"{exc} (beta = {b:g})", partial=exc.partial, beta=b) from exc
    for r in rows:
        if not r.interior:
            print(f"warning: beta = {r.beta:g}: minimum on the search-bracket edge",
                  file=sys.stderr)
    if args.format == "json":
        out.write(json.dumps([vars(r) for r in rows]) + "\n")
    else:
        out.write(beta_est.table1_csv(rows))
    return EXIT_OK


def cmd_verify(args, out):
    results = checks.run_suite(args.suite, reps=args.reps, seed=args.seed)
    failed = [r.name for r in results if not r.passed]
    if args.format == "json":
        out.write(json.dumps({
            "suite": args.suite,
            "passed": not failed,
            "failures": failed,
            "checks": [r.as_dict() for r in results],
        }) + "\n")
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            out.write(f"{status}  {r.name}  error={r.error:.3g} tol={r.tolerance:.3g}"
                      f"{'  ' + r.detail if r.detail else ''}\n")
        if failed:
            print(json.dumps({"failures": failed}), file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_efficiency(args, out):
    if args.alpha is None:
        raise UsageError("efficiency needs --alpha")
    try:
        if args.dist == "gamma":
            GammaParams(args.alpha, 1.0)
            fields = {
                "alpha": args.alpha,
                "are_inv_lambda": gamma_est.are_inv_lambda(args.alpha),
                "are_alpha_yechen": gamma_est.are_alpha_yechen(args.alpha),
            }
        else:
            if args.beta is None:
                raise UsageError("beta efficiency needs --beta")
            p = BetaParams(args.alpha, args.beta)
            fields = {
                "alpha": p.alpha,
                "beta": p.beta,
                "rho1": beta_est.rho1(p),
                "rho2": beta_est.rho2(p),
                "v_sq": beta_est.v_sq_un(p),
                "v_sq_inv_vn": beta_est.v_sq_inv_vn(p),
            }
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        out.write(json.dumps(fields) + "\n")
    elif args.format == "csv":
        out.write(",".join(fields) + "\n")
        out.write(",".join(_fmt(v, args.full_precision) for v in fields.values()) + "\n")
    else:
        for k, v in fields.items():
            out.write(f"{k:<16}  {_fmt(v, args.full_precision)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--full-precision", action="store_true",
                        help="print shortest round-trip decimals instead of 6 places")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--reps", type=int, default=None)
    common.add_argument("--nmax", type=int, default=None,
                        help=f"largest n for the Gamma UMVUEs (at most {gseries.N_MAX})")
    common.add_argument("--cache", metavar="PATH", default=None,
                        help="coefficient cache directory (default: $UMVUE_CACHE_DIR "
                             "or ~/.cache/umvue)")
    common.add_argument("--tol-rel", type=float, default=None)
    common.add_argument("--tol-abs", type=float, default=None)

    parser = argparse.ArgumentParser(
        prog="umvue", description="Unbiased and closed-form estimators for Gamma and Beta samples."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="fit a sample")
    p.add_argument("--dist", choices=("gamma", "beta"), default="gamma")
    p.add_argument("--input", help="file of values, or - for stdin")
    p.add_argument("--data", help="inline values, whitespace separated")
    p.add_argument("--column", type=int, default=None,
                   help="take this 1-based column of comma-separated lines")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("table1", parents=[common],
                       help="least efficiency of the Beta shape estimator over alpha")
    p.add_argument("--grid", default="0.05:0.05:10", help="beta grid lo:step:hi")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("verify", parents=[common], help="run numeric self-checks")
    p.add_argument("suite", choices=checks.SUITES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("efficiency", parents=[common], help="asymptotic efficiencies at a point")
    p.add_argument("--dist", choices=("gamma", "beta"), default="gamma")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.set_defaults(func=cmd_efficiency)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "column", None) is not None and args.column < 1:
        print("error: --column is 1-based", file=sys.stderr)
        return EXIT_USAGE
    if args.reps is not None and args.reps < 2:
        print("error: --reps must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, DegenerateSample, NonConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
