"""Command-line interface.

Exit codes: 0 success or all checks passed, 1 some check failed, 2 input or
usage error. JSON goes to stdout unless ``--out`` is given; inputs default
to stdin, so ``dopid gate xor | dopid compute | dopid check`` works.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import axioms, io
from .atoms import TOL, decompose
from .errors import PidError
from .measures import log_base
from .prob import Alphabet, estimate_from_samples

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _default_base() -> str:
    return os.environ.get("PID_LOG_BASE", "2")


def _parse_shape(text: str) -> tuple:
    try:
        parts = tuple(int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"invalid shape {text!r}; expected e.g. 3x3x3") from None
    if len(parts) != 3 or min(parts) < 1:
        raise UsageError(f"invalid shape {text!r}; expected three positive sizes like 3x3x3")
    return parts


def _parse_deltas(text: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"invalid delta list {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise UsageError("deltas must be positive")
    if any(b >= a for a, b in zip(vals, vals[1:])):
        raise UsageError(f"deltas must be strictly decreasing, got {text}")
    return vals


def _labels(text: str | None):
    if text is None:
        return None
    return Alphabet(tuple(v.strip() for v in text.split(",")))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pid_table(res) -> str:
    rows = [
        ("Un(X->Z|Y)", res.un_x_z_given_y),
        ("Un(Y->Z|X)", res.un_y_z_given_x),
        ("Red(X,Y->Z)", res.red),
        ("Syn(X,Y->Z)", res.syn),
        ("I(X;Z)", res.i_xz),
        ("I(Y;Z)", res.i_yz),
        ("I(X,Y;Z)", res.i_xyz),
        ("I(X;Z|Y)", res.i_xz_given_y),
        ("I(Y;Z|X)", res.i_yz_given_x),
        ("H(Z|X,Y)", res.h_z_given_xy),
        ("Red via aggregate", res.red_alt),
        ("Red(Y,X->Z)", res.red_swapped),
    ]
    rows += [("residual " + name, val) for name, val in res.residuals.items()]
    lines = [f"{name:<24} {val:>24.17g}" for name, val in rows]
    lines.append(f"{'closed system':<24} {res.closed_system!s:>24}")
    lines.append(f"{'log base':<24} {res.base:>24}")
    return "\n".join(lines) + "\n"


def cmd_compute(args) -> int:
    d = io.load_distribution(args.input)
    res = decompose(d, args.base)
    if args.format == "table":
        _emit(_pid_table(res), args.out)
    else:
        doc = res.to_json()
        doc["distribution"] = io.dist_to_json(d)
        _emit(io.dumps(doc), args.out)
    return EXIT_OK


def cmd_gate(args) -> int:
    spec = axioms.GateSpec(args.kind, args.bias_x, args.bias_y, args.noise)
    _emit(io.dumps(io.dist_to_json(axioms.make_gate(spec))), args.out)
    return EXIT_OK


def _report(report, args) -> int:
    text = report.to_table() if args.format == "table" else io.dumps(report.to_json())
    _emit(text, args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check(args) -> int:
    d = io.load_distribution(args.input)
    return _report(axioms.run_axioms(d, args.base, args.tol), args)


def cmd_battery(args) -> int:
    if args.count < 1:
        raise UsageError(f"--count must be at least 1, got {args.count}")
    shape = _parse_shape(args.shape)
    report = axioms.run_battery(
        args.count, shape, args.seed, args.boundary_fraction, args.z_support, args.base, args.tol
    )
    return _report(report, args)


def cmd_estimate(args) -> int:
    if args.alpha < 0:
        raise UsageError(f"--alpha must be nonnegative, got {args.alpha}")
    table = io.read_samples_csv(args.samples)
    given = [_labels(args.x_labels), _labels(args.y_labels), _labels(args.z_labels)]
    alph = []
    for k, a in enumerate(given):
        if a is None:
            seen = sorted({row[k] for row in table.rows})
            if not seen:
                raise UsageError("empty sample file: pass --x-labels/--y-labels/--z-labels")
            a = Alphabet(tuple(seen))
        alph.append(a)
    d = estimate_from_samples(table, *alph, smoothing_alpha=args.alpha)
    _emit(io.dumps(io.dist_to_json(d)), args.out)
    return EXIT_OK


def cmd_perturb(args) -> int:
    deltas = _parse_deltas(args.deltas)
    d = io.load_distribution(args.input)
    probe = axioms.probe_continuity(
        d, deltas, args.trials, args.seed, ceiling=args.ceiling, base=args.base
    )
    text = probe.to_table() if args.format == "table" else io.dumps(probe.to_json())
    _emit(text, args.out)
    return EXIT_OK if probe.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", default=_default_base(), help="log base: 2, e or 10 (env PID_LOG_BASE)")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--out", "--output", dest="out", default=None, help="output file (default stdout)")

    parser = argparse.ArgumentParser(
        prog="dopid",
        description="Partial information decomposition of three-variable discrete systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="decompose a distribution file")
    p.add_argument("--input", default="-", help="distribution JSON (default stdin)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("gate", parents=[common], help="write a logic-gate distribution")
    p.add_argument("kind", choices=axioms.GATE_KINDS, type=str.lower)
    p.add_argument("--bias-x", type=float, default=0.5, help="Pr(X=1)")
    p.add_argument("--bias-y", type=float, default=0.5, help="Pr(Y=1)")
    p.add_argument("--noise", type=float, default=0.0, help="output flip probability")
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("check", parents=[common], help="run every check on one distribution")
    p.add_argument("--input", default="-")
    p.add_argument("--tol", type=float, default=TOL)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("battery", parents=[common], help="run the checks on random distributions")
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--shape", default="3x3x3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--boundary-fraction", type=float, default=0.0)
    p.add_argument("--z-support", type=int, default=None, help="Z support size for boundary samples")
    p.add_argument("--tol", type=float, default=TOL)
    p.set_defaults(func=cmd_battery)

    p = sub.add_parser("estimate", parents=[common], help="estimate a distribution from CSV samples")
    p.add_argument("--samples", required=True, help="CSV with header x,y,z")
    p.add_argument("--x-labels", default=None, help="comma-separated X alphabet")
    p.add_argument("--y-labels", default=None)
    p.add_argument("--z-labels", default=None)
    p.add_argument("--alpha", type=float, default=0.0, help="additive smoothing")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("perturb", parents=[common], help="probe continuity around a distribution")
    p.add_argument("--input", default="-")
    p.add_argument("--deltas", default="1e-2,1e-4,1e-6")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ceiling", type=float, default=1e-3)
    p.set_defaults(func=cmd_perturb)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        log_base(args.base)
    except ValueError as exc:
        print(f"UsageError: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except PidError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"UsageError: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
