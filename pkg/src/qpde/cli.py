"""Command-line front end: expand, verify, verify-all, moments, scan, numeric-check, list.

Exit codes: 0 when everything passed or the command completed, 1 when a
verification failed (the reports are still written), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import combinatorics, congruence, identities, numeric, special
from .errors import QPDEError, UnknownIdentity
from .series import _fmt_rat

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# evaluation points for numeric-check: (u, v, tau); v is ignored by checks that derive it
DEFAULT_POINTS = [
    (0.13 + 0.07j, 0.21 + 0.31j, 1.1j),
    (0.31 - 0.05j, 0.17 + 0.4j, 0.2 + 0.9j),
    (-0.22 + 0.11j, 0.33 - 0.12j, -0.15 + 1.3j),
    (0.41 + 0.02j, -0.27 + 0.2j, 0.05 + 0.8j),
    (0.08 - 0.13j, 0.45 + 0.05j, 0.3 + 1.5j),
]


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=_rational, default=None, help="truncation order, e.g. 20 or 41/2")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")

    ap = argparse.ArgumentParser(prog="qpde", description="Exact q-series expansions and identity checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    kinds = ", ".join(k.value for k in special.Kind)
    p = sub.add_parser("expand", parents=[common], help="expand a generating function")
    p.add_argument("name", help=f"one of: {kinds}")
    p.add_argument("--alpha", type=_rational, default=Fraction(0))
    p.add_argument("--beta", type=_rational, default=Fraction(0))
    p.add_argument("--c", type=_rational, default=Fraction(1), help="z-scale of theta/mu, or n for poch")
    p.add_argument("--k", type=_rational, default=Fraction(1), help="tau scale")
    p.add_argument("--variant", choices=[v.value for v in special.NDEVariant], default="overpartition")

    p = sub.add_parser("verify", parents=[common], help="verify one identity")
    p.add_argument("name")
    p.add_argument("--alpha", type=_rational, default=None)
    p.add_argument("--beta", type=_rational, default=None)

    sub.add_parser("verify-all", parents=[common], help="verify every identity in the registry")

    p = sub.add_parser("moments", parents=[common], help="tabulate symmetrized rank moments")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--odd", action="store_true", help="odd-Durfee moments instead of rank moments")

    p = sub.add_parser("scan", parents=[common], help="search for congruences A n + B mod p^j")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--a-max", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--source", choices=("odd-moments", "partitions"), default="odd-moments")

    p = sub.add_parser("numeric-check", parents=[common], help="evaluate an identity at complex points")
    p.add_argument("name", help="one of: " + ", ".join(numeric.CHECKS))
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-6, help="pass threshold on the absolute residual")
    p.add_argument("--prec", type=int, default=None, help="mantissa bits (uses mpmath)")

    sub.add_parser("list", parents=[common], help="list registered identities")
    return ap


# commands --------------------------------------------------------------------------

def _order(args, default=Fraction(20)):
    order = default if args.order is None else args.order
    if order <= 0:
        raise UsageError("order must be positive")
    return order


def _cmd_expand(args):
    try:
        kind = special.Kind(args.name)
    except ValueError:
        raise UsageError(f"unknown generator: {args.name}") from None
    spec = special.GeneratorSpec(kind, c=args.c, k=args.k, alpha=args.alpha, beta=args.beta,
                                 nde=special.NDEVariant(args.variant), order=_order(args))
    s = spec.build()
    if args.format == "json":
        return EXIT_OK, json.dumps(s.to_json())
    lines = [f"# {kind.value}, order {_fmt_rat(s.order)}"]
    lines += [f"q^{_fmt_rat(e)}: {c}" for e, c in s.items()]
    return EXIT_OK, "\n".join(lines)


def _params(args):
    if args.alpha is None and args.beta is None:
        return None
    return (args.alpha or Fraction(0), args.beta or Fraction(0))


def _report_text(r):
    line = f"{r.label():40s} order {_fmt_rat(r.order):>6s}  {r.status.upper():4s}  {r.seconds:.3f}s"
    if r.discrepancy:
        d = r.discrepancy
        line += f"\n    first mismatch at q^{d['q']}: lhs {d['lhs']} vs rhs {d['rhs']}"
    return line


def _cmd_verify(args):
    entry = identities.get_entry(args.name)
    params = _params(args)
    order = None if args.order is None else _order(args)
    if entry.needs_params and params is None:
        reports = [identities.verify(args.name, order, p) for p in identities.DEFAULT_PARAMS]
    else:
        reports = [identities.verify(args.name, order, params if entry.needs_params else None)]
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    if args.format == "json":
        doc = reports[0].to_json() if len(reports) == 1 else [r.to_json() for r in reports]
        return code, json.dumps(doc)
    return code, "\n".join(_report_text(r) for r in reports)


def _cmd_verify_all(args):
    order = None if args.order is None else _order(args)
    reports = identities.verify_all(order)
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    if args.format == "json":
        return code, identities.reports_to_json(reports)
    passed = sum(r.passed for r in reports)
    lines = [_report_text(r) for r in reports]
    lines.append(f"{passed}/{len(reports)} passed")
    return code, "\n".join(lines)


def _cmd_moments(args):
    if args.k < 1 or args.n_max < 0:
        raise UsageError("k must be positive and n-max nonnegative")
    table = combinatorics.moment_table(args.k, args.n_max, odd=args.odd)
    if args.format == "json":
        return EXIT_OK, json.dumps({"k": table.k, "odd": table.odd,
                                    "values": {str(n): v for n, v in table.values.items()}})
    return EXIT_OK, table.to_csv().rstrip("\n")


def _cmd_scan(args):
    if args.a_max < 1 or args.n_max < 0:
        raise UsageError("a-max must be positive and n-max nonnegative")
    found = congruence.scan(args.p, args.j, args.k, args.a_max, args.n_max, source=args.source)
    if args.format == "json":
        return EXIT_OK, congruence.to_jsonl(found).rstrip("\n")
    lines = [f"# mod {args.p}^{args.j}, k = {args.k}, A <= {args.a_max}, n <= {args.n_max}: "
             f"{len(found)} candidate(s), verified only up to the tested range"]
    lines += [f"A = {c.A}, B = {c.B}" for c in found]
    return EXIT_OK, "\n".join(lines)


def _cmd_numeric(args):
    if args.name not in numeric.CHECKS:
        raise UnknownIdentity(args.name)
    inner = min(1e-12, args.tol * 1e-3)
    points = [numeric.ComplexPoint(u, v, tau, inner) for u, v, tau in DEFAULT_POINTS]
    res = numeric.numeric_check(args.name, args.alpha, args.beta, points, prec=args.prec)
    ok = all(r.absErr < args.tol for r in res)
    code = EXIT_OK if ok else EXIT_FAIL
    if args.format == "json":
        return code, json.dumps([dict(r.to_json(), passed=r.absErr < args.tol) for r in res])
    lines = [f"{'check':14s} {'u':>18s} {'tau':>14s} {'absErr':>10s}  threshold {args.tol:g}"]
    for r in res:
        p = r.point
        verdict = "pass" if r.absErr < args.tol else "FAIL"
        lines.append(f"{r.name:14s} {p.u:>18.3f} {p.tau:>14.3f} {r.absErr:10.2e}  {verdict}")
    return code, "\n".join(lines)


def _cmd_list(args):
    entries = identities.list_identities()
    if args.format == "json":
        return EXIT_OK, json.dumps([{"name": e.name, "defaultOrder": _fmt_rat(e.default_order),
                                     "needsParams": e.needs_params, "reference": e.reference}
                                    for e in entries])
    return EXIT_OK, "\n".join(f"{e.name:16s} order {_fmt_rat(e.default_order):>4s}"
                              f"{'  (alpha, beta)' if e.needs_params else ''}  {e.reference}"
                              for e in entries)


COMMANDS = {
    "expand": _cmd_expand,
    "verify": _cmd_verify,
    "verify-all": _cmd_verify_all,
    "moments": _cmd_moments,
    "scan": _cmd_scan,
    "numeric-check": _cmd_numeric,
    "list": _cmd_list,
}


def run(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        code, text = COMMANDS[args.command](args)
    except UnknownIdentity as exc:
        print(f"error: unknown identity {exc.args[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, QPDEError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
