"""``ergomax`` command line.

Exit codes: 0 success or all checks pass, 1 a violation was found, 2 bad
usage or unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from .campaign import ConfigError, load_config, run_campaign, serialize_report
from .core import to_fraction
from .cz import WindowTooSmallError, cz_decompose, strong_pp_check, weak11_with_Mw, weighted_weak_pp
from .ergodic import (
    InvalidSystemError,
    converse_probe,
    ergodic_ap_constant,
    ergodic_maximal,
    find_rectangle_base,
    validate_system,
    verify_transference_identity,
)
from .io import read_atom_function, read_sequence, read_system, read_weight
from .maximal_ops import OPERATORS, maximal
from .reports import jsonable
from .weights import ap_constant, weighted_norm

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def parse_lambda_grid(spec: str, exact: bool = False) -> list:
    """``"0.5,1/4"`` lists heights; ``"geom:L0:COUNT"`` gives ``L0 / 2^i`` for ``i < COUNT``."""
    conv = to_fraction if exact else (lambda s: float(to_fraction(s)))
    if spec.startswith("geom:"):
        try:
            _, start, count = spec.split(":")
            lam0, n = conv(start), int(count)
        except ValueError as exc:
            raise ValueError(f"bad lambda grid {spec!r}; expected geom:L0:COUNT") from exc
        two = Fraction(2) if exact else 2.0
        grid = [lam0 / two ** i for i in range(n)]
    else:
        grid = [conv(s) for s in spec.split(",") if s.strip()]
    if not grid or any(lam <= 0 for lam in grid):
        raise ValueError("lambda grid must be non-empty and positive")
    return grid


def _fmt(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(float(x))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_maximal(args) -> int:
    a = read_sequence(args.input, args.exact)
    lo = a.lo if args.eval_lo is None else args.eval_lo
    hi = a.hi if args.eval_hi is None else args.eval_hi
    res = maximal(a, args.op, args.truncate, (lo, hi), with_witness=True)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["m", "value", "witness_lo", "witness_hi"])
        for k, m in enumerate(range(lo, hi + 1)):
            wit = res.witnesses[k] if res.witnesses else None
            writer.writerow([m, _fmt(res[m]), *(("", "") if wit is None else (wit.lo, wit.hi))])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_apconst(args) -> int:
    w = read_weight(args.weight, args.exact)
    rep = ap_constant(w, args.p, threshold=args.threshold, exact=args.exact)
    I = rep.witness
    print(f"constant {_fmt(rep.constant)}")
    print(f"witness [{I.lo},{I.hi}]")
    if args.threshold is not None:
        print(f"exceeds_threshold {str(rep.threshold_exceeded).lower()}")
    return EXIT_OK


def cmd_wnorm(args) -> int:
    a = read_sequence(args.input)
    w = read_weight(args.weight)
    print(_fmt(weighted_norm(a, w, args.p)))
    return EXIT_OK


def cmd_cz(args) -> int:
    a = read_sequence(args.input, args.exact)
    lam = to_fraction(args.lam) if args.exact else float(to_fraction(args.lam))
    dec = cz_decompose(a, lam)
    for I, avg in zip(dec.intervals, dec.averages):
        print(I.level, I.index, I.lo, I.hi, _fmt(avg))
    return EXIT_OK


def cmd_verify(args) -> int:
    exact = args.exact
    a = read_sequence(args.input, exact)
    w = read_weight(args.weight, exact)
    if args.check == "strongpp":
        reports = [strong_pp_check(a, w, args.p, cap=args.cap)]
    else:
        reports = []
        for lam in parse_lambda_grid(args.lambda_grid, exact):
            if args.check == "weak11":
                reports.append(weak11_with_Mw(a, w, lam))
            else:
                reports.append(weighted_weak_pp(a, w, args.p, lam))
    failed = [r for r in reports if not r.passed]
    for r in reports:
        print(json.dumps(r.to_dict(), sort_keys=True))
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_ergodic(args) -> int:
    system = read_system(args.system)
    diag = validate_system(system)
    exact = system.exact
    if args.action == "maximal":
        f = read_atom_function(args.f, exact)
        vals = ergodic_maximal(system, f, args.J).values
        for x, v in enumerate(vals):
            print(x, _fmt(v))
    elif args.action == "apconst":
        w = read_atom_function(args.weight, exact)
        rep = ergodic_ap_constant(system, w, args.p, args.n_max)
        print(f"constant {_fmt(rep.constant)}")
        print(f"witness atom {rep.witness[0]} N {rep.witness[1]}")
    elif args.action == "transfer":
        f = read_atom_function(args.f, exact)
        atoms = [args.x] if args.x is not None else system.positive_atoms()
        for x in atoms:
            res = verify_transference_identity(system, f, x, args.L, args.J)
            if not res:
                print(f"mismatch x {x} m {res.witness_m}: ergodic {_fmt(res.ergodic_value)} "
                      f"sequence {_fmt(res.sequence_value)}")
                return EXIT_VIOLATION
        print(f"identity holds for {len(atoms)} atom(s), |m| <= {args.L}, J = {args.J}")
    elif args.action == "rectangle":
        F = None if args.F is None else [int(s) for s in args.F.split(",")]
        rect = find_rectangle_base(system, args.K, F)
        print("base", " ".join(str(x) for x in sorted(rect.base)))
        for i, level in zip(range(-args.K, args.K + 1), rect.levels):
            print(f"U^{i}E", " ".join(str(x) for x in sorted(level)))
    elif args.action == "converse":
        w = read_atom_function(args.weight)
        rep = converse_probe(system, w, args.p, args.J, trials=args.trials, seed=args.seed)
        print(json.dumps(jsonable({"A": rep.ap_constant, "B": rep.operator_ratio, "n": rep.n,
                                   "p": rep.p, "J": rep.J}), sort_keys=True))
    if not diag.ergodic:
        print("note: system is not ergodic", file=sys.stderr)
    return EXIT_OK


def cmd_campaign(args) -> int:
    cfg = load_config(args.config)
    report = run_campaign(cfg, jobs=args.jobs)
    text = serialize_report(report)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    s = report["summary"]
    for name, c in sorted(s["checks"].items()):
        print(f"{name:16s} {c['count']:6d} instances  {c['failures']:4d} failures  max ratio {c['max_ratio']}")
    print(f"total {s['total']}  failures {s['failures']}")
    return EXIT_OK if s["passed"] else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ergomax", description="Discrete maximal operators, "
                                     "A_p weights and maximal ergodic checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maximal", help="evaluate a maximal operator and write CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--op", choices=OPERATORS, required=True)
    p.add_argument("--truncate", type=int, metavar="J")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--eval-lo", type=int)
    p.add_argument("--eval-hi", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_maximal)

    p = sub.add_parser("apconst", help="windowed A_p constant of a weight")
    p.add_argument("--weight", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_apconst)

    p = sub.add_parser("wnorm", help="weighted l^p norm")
    p.add_argument("--input", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_wnorm)

    p = sub.add_parser("cz", help="Calderon-Zygmund intervals at a height")
    p.add_argument("--input", required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_cz)

    p = sub.add_parser("verify", help="check a weak- or strong-type inequality")
    p.add_argument("check", choices=("weak11", "weakpp", "strongpp"))
    p.add_argument("--input", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--lambda-grid", default="geom:4:8")
    p.add_argument("--cap", type=float, help="fail strongpp when the norm ratio exceeds this")
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ergodic", help="finite measure-preserving systems")
    p.add_argument("action", choices=("maximal", "apconst", "transfer", "rectangle", "converse"))
    p.add_argument("--system", required=True)
    p.add_argument("--f")
    p.add_argument("--weight")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--J", type=int)
    p.add_argument("--L", type=int, default=0)
    p.add_argument("--K", type=int, default=1)
    p.add_argument("--F", help="comma-separated atoms")
    p.add_argument("--x", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ergodic)

    p = sub.add_parser("campaign", help="run a verification campaign")
    p.add_argument("--config")
    p.add_argument("--report")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_campaign)
    return parser


_REQUIRED = {
    ("ergodic", "maximal"): ("f",),
    ("ergodic", "apconst"): ("weight",),
    ("ergodic", "transfer"): ("f", "J"),
    ("ergodic", "converse"): ("weight", "J"),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    missing = [f"--{k}" for k in _REQUIRED.get((args.command, getattr(args, "action", None)), ())
               if getattr(args, k) is None]
    if missing:
        parser.error(f"ergodic {args.action} needs {', '.join(missing)}")
    try:
        return args.func(args)
    except (ConfigError, InvalidSystemError, WindowTooSmallError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
