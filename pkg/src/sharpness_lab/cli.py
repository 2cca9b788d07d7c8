"""Command-line front end.

Exit status: 0 success, 1 verification failures, 2 unreadable input,
3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import convex_geometry as cg
from .exp_type import (ExpPair, RadialCosine, TrigPolynomial, asymptotic_sharpness,
                       check_bernstein, extremal_line_check)
from .harness import run_campaign
from .polynomials import (MultiPolynomial, WeightedBody, markov_check, markov_sharpness,
                          weighted_markov_check, weighted_sharpness)
from .report import VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    """Input file missing or not in the expected format."""


# ------------------------------------------------------------ input

def read_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _parse(path, builder):
    d = read_json(path)
    try:
        return builder(d)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{path}: invalid content ({type(exc).__name__}: {exc})") from exc


def load_body(path):
    return _parse(path, cg.body_from_dict)


def load_function(path):
    def build(d):
        return ExpPair.from_dict(d) if "a" in d else TrigPolynomial.from_dict(d)
    return _parse(path, build)


def load_weighted(path):
    def build(d):
        base = d["base"] if "base" in d else d
        if isinstance(base, str):
            base = read_json(base)
        return WeightedBody(cg.body_from_dict(base))
    return _parse(path, build)


def parse_vector(text):
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()])
    except ValueError as exc:
        raise InputError(f"not a vector: {text!r}") from exc


# ------------------------------------------------------------ output

def _plain(v):
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    if isinstance(v, list):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render(result, fmt):
    if isinstance(result, VerificationReport):
        if fmt == "json":
            return result.to_json()
        if fmt == "csv":
            return result.to_csv()
        return result.table()
    rows = result if isinstance(result, list) else [result]
    rows = [_plain(r) for r in rows]
    if fmt == "json":
        return json.dumps(rows if isinstance(result, list) else rows[0], indent=1,
                          sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        keys = list(rows[0]) if rows else []
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([";".join(map(repr, r[k])) if isinstance(r[k], list) else
                        (repr(r[k]) if isinstance(r[k], float) else r[k]) for k in keys])
        return buf.getvalue()
    if isinstance(result, list):
        keys = list(rows[0]) if rows else []
        lines = ["  ".join(keys)]
        lines += ["  ".join(_fmt(r[k]) for k in keys) for r in rows]
        return "\n".join(lines)
    width = max(len(k) for k in rows[0])
    return "\n".join(f"{k:<{width}}  {_fmt(v)}" for k, v in rows[0].items())


# ------------------------------------------------------------ commands

def cmd_constant(args):
    K, V = load_body(args.K), load_body(args.V)
    wc = cg.sharp_constant(K, V, samples=args.samples, seed=args.seed)
    return wc.as_dict()


def cmd_polar(args):
    return cg.body_to_dict(cg.polar(load_body(args.V)))


def cmd_norm(args):
    V = load_body(args.V)
    x = parse_vector(" ".join(args.vector))
    if x.shape != (V.dim,):
        raise InputError(f"vector has {x.size} coordinates, body has dimension {V.dim}")
    return {"gauge": cg.gauge(V, x), "support": cg.support_max(V, x),
            "support_point": cg.support_argmax(V, x)}


def cmd_bernstein(args):
    K = load_body(args.K)
    f = load_function(args.f)
    V = load_body(args.spectrum) if args.spectrum else None
    return check_bernstein(f, K, V, resolution=args.resolution, n_points=args.points,
                           seed=args.seed, allowance=args.allowance,
                           instance=f"{args.K} {args.f}")


def cmd_markov(args):
    K, V = load_body(args.K), load_body(args.V)
    report = VerificationReport(f"markov {args.K} {args.V}")
    if args.P:
        P = _parse(args.P, MultiPolynomial.from_dict)
        report.extend(markov_check(P, K, V, n_points=args.points, resolution=args.resolution,
                                   seed=args.seed, allowance=args.allowance, instance=args.P))
    if args.ridge:
        report.extend(markov_sharpness(args.ridge, K, V, resolution=args.resolution,
                                       instance=f"ridge T_{args.ridge}"))
    if not (args.P or args.ridge):
        raise InputError("markov needs a polynomial file or --ridge N")
    return report


def cmd_weighted(args):
    K, W = load_body(args.K), load_weighted(args.W)
    report = VerificationReport(f"weighted-markov {args.K} {args.W}")
    if args.Q:
        Q = _parse(args.Q, MultiPolynomial.from_dict)
        report.extend(weighted_markov_check(Q, K, W, n_points=args.points,
                                            resolution=args.resolution, seed=args.seed,
                                            allowance=args.allowance, instance=args.Q))
    if args.ridge:
        report.extend(weighted_sharpness(args.ridge, K, W, instance=f"T_{2 * args.ridge}"))
    if not (args.Q or args.ridge):
        raise InputError("weighted-markov needs a polynomial file or --ridge N")
    return report


def cmd_asymptotic(args):
    m = args.dim
    K = load_body(args.K) if args.K else cg.unit_ball(m)
    V = load_body(args.V) if args.V else cg.unit_ball(m)
    return asymptotic_sharpness(K, V, args.sigmas)


def cmd_extremal_line(args):
    if args.f:
        f0 = load_function(args.f)
        vecs = {}
        for name in ("a", "y0", "x0"):
            text = getattr(args, name)
            if text is None:
                raise InputError(f"--{name} is required with a function file")
            vecs[name] = parse_vector(text)
        a, y0, x0 = vecs["a"], vecs["y0"], vecs["x0"]
    else:
        m, s = args.dim, args.sigma
        e1 = np.eye(m)[0]
        f0 = RadialCosine(args.R, s, m)
        a, y0, x0 = s * e1, e1, (math.pi / (2 * s)) * e1
        if args.negative_control:
            f0 = _ShiftedCosine(a, 0.5)
    return extremal_line_check(f0, a, y0, x0, tol=args.tol, instance="extremal-line")


class _ShiftedCosine:
    """``cos(a, x) + shift``: never extremal when shift != 0."""

    def __init__(self, a, shift):
        self.a, self.shift = np.asarray(a, dtype=float), shift

    def value(self, x):
        return np.cos(np.asarray(x) @ self.a) + self.shift

    def gradient(self, x):
        return np.multiply.outer(-np.sin(np.asarray(x) @ self.a), self.a)


def cmd_campaign(args):
    desc = read_json(args.descriptor)
    if not isinstance(desc, dict):
        raise InputError(f"{args.descriptor}: campaign descriptor must be a JSON object")
    for key, val in (("seed", args.seed_override), ("trials", args.trials),
                     ("resolution", args.resolution_override)):
        if val is not None:
            desc[key] = val
    try:
        return run_campaign(desc)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.descriptor}: invalid descriptor ({exc})") from exc


# ------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default=None)
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--resolution", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)

    p = argparse.ArgumentParser(prog="sharpness-lab",
                                description="Sharp Bernstein/Markov constants and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("constant", cmd_constant, "sharp constant M(K,V) with witnesses")
    sp.add_argument("K")
    sp.add_argument("V")
    sp.add_argument("--samples", type=int, default=10_000)

    sp = add("polar", cmd_polar, "polar body as JSON")
    sp.add_argument("V")

    sp = add("norm", cmd_norm, "gauge and support function at a vector")
    sp.add_argument("V")
    sp.add_argument("vector", nargs="+", help="coordinates, space or comma separated")

    sp = add("bernstein", cmd_bernstein, "check (2.4), (2.8), (2.9) for one function")
    sp.add_argument("K")
    sp.add_argument("f", help="TrigPolynomial or ExpPair JSON")
    sp.add_argument("--spectrum", help="spectrum body for an ExpPair")
    sp.add_argument("--points", type=int, default=32)
    sp.add_argument("--allowance", type=float, default=None)

    sp = add("markov", cmd_markov, "check (3.1)-(3.3) for a polynomial")
    sp.add_argument("K")
    sp.add_argument("V")
    sp.add_argument("P", nargs="?")
    sp.add_argument("--ridge", type=int, default=0, help="also check the ridge T_N equality")
    sp.add_argument("--points", type=int, default=32)
    sp.add_argument("--allowance", type=float, default=None)

    sp = add("weighted-markov", cmd_weighted, "check (3.7) on C(V)")
    sp.add_argument("K")
    sp.add_argument("W", help="base body descriptor, or {\"base\": descriptor or path}")
    sp.add_argument("Q", nargs="?")
    sp.add_argument("--ridge", type=int, default=0)
    sp.add_argument("--points", type=int, default=32)
    sp.add_argument("--allowance", type=float, default=None)

    sp = add("asymptotic", cmd_asymptotic, "lattice-rounded extremal pairs versus sigma")
    sp.add_argument("--K")
    sp.add_argument("--V")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--sigmas", type=float, nargs="+", default=[10.0, 20.0, 40.0])

    sp = add("extremal-line", cmd_extremal_line, "ridge agreement along an extremal line")
    sp.add_argument("--f", help="function JSON; default is the radial cosine")
    sp.add_argument("--a")
    sp.add_argument("--y0")
    sp.add_argument("--x0")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--sigma", type=float, default=10.0)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--negative-control", action="store_true")

    sp = add("campaign", cmd_campaign, "run a campaign descriptor")
    sp.add_argument("descriptor")
    return p


def _finish_args(args):
    # campaign flags override the descriptor only when given
    args.seed_override = args.seed
    args.resolution_override = args.resolution
    args.seed = 0 if args.seed is None else args.seed
    args.resolution = 64 if args.resolution is None else args.resolution
    if args.format is None:
        args.format = "table" if sys.stdout.isatty() and args.out is None else "json"
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _finish_args(parser.parse_args(argv))
    except SystemExit as exc:  # argparse usage errors exit 2 already
        return int(exc.code or 0)
    try:
        result = args.func(args)
        text = render(result, args.format)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (cg.BodyError, cg.WitnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE if isinstance(exc, cg.BodyError) else EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if isinstance(result, VerificationReport) and not result.ok:
        print(f"{result.failures} verification failure(s)", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
