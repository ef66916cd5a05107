"""Command-line interface.

Exit codes: 0 success, 2 failed validation (``check-gen``), 1 I/O or
numeric error, 64 usage error.
"""

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import copula, extremes, gen as genmod, regvar, sampler, taildep, threshold
from .errors import ArchimaxError, DomainError, NumericError

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_INVALID = 2
EXIT_USAGE = 64

FAMILIES = ("clayton", "gumbel", "independence", "countermonotone", "log19", "oscillating")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# -- serialization ----------------------------------------------------------

def _num(x):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % x


def _plain(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if not callable(getattr(obj, f.name))}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items() if not callable(v)}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _json(obj):
    # json.dumps writes floats by repr; reports need a fixed 17 significant digits
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ", ".join(f"{_json(k)}: {_json(v)}" for k, v in items) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    return _json(str(obj))


def _trace(report):
    for name in ("limit_trace", "trace", "sup_deviation_by_n", "points", "rows"):
        val = getattr(report, name, None)
        if val:
            return [(row[0], row[1]) for row in val]
    return []


def emit_report(report, fmt="json"):
    """Serialize a report.

    JSON has sorted keys, floats at 17 significant digits and non-finite
    values as the strings ``"inf"``/``"nan"``.  CSV carries the report's
    trace with columns ``scale,value``.

    Returns
    -------
    bytes
    """
    if fmt == "json":
        return (_json(_plain(report)) + "\n").encode("utf-8")
    if fmt == "csv":
        lines = ["scale,value"]
        for a, b in _trace(report):
            lines.append(f"{_csv_num(a)},{_csv_num(b)}")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise DomainError(f"unknown format {fmt!r}")


def _csv_num(x):
    if x is None:
        return ""
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return "%.17g" % x


# -- argument parsing -------------------------------------------------------

def _add_generator(p, dim_default=2):
    p.add_argument("--generator", required=True, choices=FAMILIES,
                   help="generator family")
    p.add_argument("--theta", type=float, default=None,
                   help="family parameter (clayton, gumbel, log19); default 1")
    p.add_argument("--a", type=float, default=None,
                   help="oscillating amplitude; default is the largest admissible at --dim")
    p.add_argument("--dim", type=int, default=dim_default, help=f"dimension (default {dim_default})")


def _add_output(p, formats=("json", "csv")):
    p.add_argument("--out", default=None, help="output path (default: standard output)")
    p.add_argument("--format", choices=formats, default=formats[0],
                   help=f"report format (default {formats[0]})")


def build_parser():
    p = _Parser(prog="archimax",
                description="Archimedean copulas through l1-norm symmetric distributions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="sample a copula to CSV")
    _add_generator(s)
    s.add_argument("--n", type=int, required=True, help="number of rows")
    s.add_argument("--seed", type=int, required=True, help="random seed (required)")
    s.add_argument("--out", default=None, help="output CSV (default: standard output)")

    e = sub.add_parser("eval", help="evaluate the copula or the generator")
    _add_generator(e)
    e.add_argument("--point", action="append", default=[],
                   help="comma-separated point; repeatable")
    e.add_argument("--kind", choices=("copula", "generator", "survival"), default="copula",
                   help="copula C(u), generator psi(x) or joint survival psi(sum x)")
    _add_output(e, ("json",))

    c = sub.add_parser("check-gen", help="check d-monotonicity (exit 2 on failure)")
    _add_generator(c)
    _add_output(c, ("json",))

    t = sub.add_parser("taildep", help="tail-dependence coefficients")
    _add_generator(t)
    t.add_argument("--coefficient", default="all",
                   choices=("all", "lower", "upper", "lower_mn", "bar_lower", "bar_upper"))
    t.add_argument("--m", type=int, default=1, help="m for lower_mn (default 1)")
    t.add_argument("--n", type=int, default=1, help="n for lower_mn (default 1)")
    _add_output(t)

    v = sub.add_parser("ev-limit", help="Gumbel limit of C^n(u^(1/n))")
    _add_generator(v)
    _add_output(v)

    h = sub.add_parser("threshold", help="threshold copula limits")
    _add_generator(h)
    h.add_argument("--mode", choices=("lower", "upper"), default="lower")
    h.add_argument("--v", type=float, default=1e-4, help="upper threshold (default 1e-4)")
    h.add_argument("--x1", type=float, default=0.5)
    h.add_argument("--x2", type=float, default=0.5)
    h.add_argument("--alpha", type=float, default=None,
                   help="index for the upper limit H_0; estimated when omitted")
    _add_output(h)

    r = sub.add_parser("regvar", help="regular-variation index of the generator")
    _add_generator(r)
    r.add_argument("--location", choices=regvar.LOCATIONS, default="infinity")
    _add_output(r)
    return p


def parse_args(argv):
    """Parse ``argv`` into a namespace; raises ``UsageError`` on bad input."""
    args = build_parser().parse_args(argv)
    if args.dim < 2:
        raise UsageError("archimax: error: --dim must be >= 2")
    if args.command == "sample" and args.n < 1:
        raise UsageError("archimax: error: --n must be >= 1")
    return args


def _generator(args, validate=True):
    params = {}
    if args.theta is not None:
        params["theta"] = args.theta
    if args.a is not None:
        params["a"] = args.a
    try:
        return genmod.make_family(args.generator, params, d=args.dim, validate=validate)
    except DomainError as exc:
        raise UsageError(f"archimax: error: {exc}") from exc


def _points(args):
    try:
        pts = [[float(v) for v in p.split(",")] for p in args.point]
    except ValueError as exc:
        raise UsageError(f"archimax: error: bad --point: {exc}") from exc
    if not pts:
        raise UsageError("archimax: error: at least one --point is required")
    return pts


# -- commands ---------------------------------------------------------------

def _cmd_sample(args):
    g = _generator(args)
    M = sampler.sample_copula(g, args.dim, args.n, args.seed)
    return EXIT_OK, sampler.write_csv(M).encode("utf-8")


def _cmd_eval(args):
    g = _generator(args)
    pts = _points(args)
    vals = []
    for p in pts:
        if args.kind == "copula":
            if len(p) != args.dim:
                raise UsageError(f"archimax: error: point {p} does not have --dim={args.dim} entries")
            vals.append(float(copula.eval_copula(g, p)))
        elif args.kind == "survival":
            vals.append(float(copula.eval_survival(g, p)))
        else:
            vals.append([float(v) for v in np.atleast_1d(g.eval(p))])
    rep = {"generator": args.generator, "params": dict(g.params), "dim": args.dim,
           "kind": args.kind, "points": pts, "values": vals}
    return EXIT_OK, emit_report(rep, "json")


def _cmd_check_gen(args):
    g = _generator(args, validate=False)
    rep = genmod.check_d_monotone(g, args.dim)
    out = {"report": rep, "passed": rep.passed, "generator": args.generator, "dim": args.dim}
    if not rep.passed:
        cell = copula.find_negative_rectangle(g, args.dim)
        if cell is not None:
            lo, hi, mass = cell
            out["negative_rectangle"] = {"lower": lo, "upper": hi, "mass": mass}
    return (EXIT_OK if rep.passed else EXIT_INVALID), emit_report(out, "json")


def _taildep_reports(g, args):
    return {
        "lower": lambda: taildep.lambda_lower(g),
        "upper": lambda: taildep.lambda_upper(g),
        "lower_mn": lambda: taildep.lambda_lower_mn(g, args.m, args.n),
        "bar_lower": lambda: taildep.lambda_bar_lower(g),
        "bar_upper": lambda: taildep.lambda_bar_upper(g),
    }


def _cmd_taildep(args):
    g = _generator(args)
    table = _taildep_reports(g, args)
    if args.coefficient != "all":
        rep = table[args.coefficient]()
        return EXIT_OK, emit_report(rep, args.format)
    if args.format == "csv":
        raise UsageError("archimax: error: --format csv needs a single --coefficient")
    out = {f"lambda_{k}": fn() for k, fn in table.items()}
    out["generator"] = args.generator
    return EXIT_OK, emit_report(out, "json")


def _cmd_ev(args):
    g = _generator(args)
    return EXIT_OK, emit_report(extremes.gumbel_limit_theta(g), args.format)


def _cmd_threshold(args):
    g = _generator(args)
    if args.mode == "lower":
        return EXIT_OK, emit_report(threshold.lltc_parameters(g, args.dim), args.format)
    alpha = args.alpha
    if alpha is None:
        est = regvar.rv_index(g.one_minus, "origin", j_max=200)
        if not est.converged:
            raise NumericError("origin index of 1 - psi did not converge")
        alpha = est.index
    try:
        limit = float(threshold.upper_threshold_limit(args.x1, args.x2, alpha))
    except DomainError as exc:
        raise UsageError(f"archimax: error: {exc}") from exc
    finite = float(threshold.upper_threshold_finite(g, args.v, args.x1, args.x2))
    rep = {"alpha": alpha, "v": args.v, "x1": args.x1, "x2": args.x2,
           "finite": finite, "limit": limit, "deviation": abs(finite - limit)}
    if args.format == "csv":
        raise UsageError("archimax: error: upper threshold report has no trace")
    return EXIT_OK, emit_report(rep, "json")


def _cmd_regvar(args):
    g = _generator(args)
    try:
        est = regvar.generator_index(g, args.location)
    except DomainError as exc:
        raise UsageError(f"archimax: error: {exc}") from exc
    return EXIT_OK, emit_report(est, args.format)


COMMANDS = {"sample": _cmd_sample, "eval": _cmd_eval, "check-gen": _cmd_check_gen,
            "taildep": _cmd_taildep, "ev-limit": _cmd_ev, "threshold": _cmd_threshold,
            "regvar": _cmd_regvar}


def run(argv):
    """Execute a command; returns ``(exit_code, output_bytes)``."""
    args = parse_args(argv)
    return args, COMMANDS[args.command](args)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args, (code, payload) = run(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, OSError) as exc:
        print(f"archimax: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ArchimaxError as exc:
        print(f"archimax: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = getattr(args, "out", None)
    try:
        if out:
            with open(out, "wb") as fh:
                fh.write(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
    except OSError as exc:
        print(f"archimax: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if code == EXIT_INVALID:
        print("archimax: validation failed", file=sys.stderr)
    return code
