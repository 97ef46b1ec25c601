"""Command line entry point: run verification checks and reduce DSL expressions."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import expr as ex
from . import kernel as kc
from .checks import CHECKS, run_check
from .dsl import DslError, parse, render
from .render import render_poly_math
from .tensor import Poly, is_dummy, relabel_factor, term_labels

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argparse already exits with 2 on usage errors; keep it but route the text to stderr
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _n_list(text: str) -> list[int]:
    try:
        vals = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid n list {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("n values must be positive integers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bergman-model", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run named checks and report verdicts")
    sel = v.add_mutually_exclusive_group(required=True)
    sel.add_argument("--check", action="append", metavar="NAME", help="check to run (repeatable)")
    sel.add_argument("--all", action="store_true", help="run every registered check")
    sel.add_argument("--list", action="store_true", help="list check names and exit")
    v.add_argument("--n", type=_n_list, default=[1, 2], metavar="LIST", help="comma separated dimensions")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--trunc", type=int, default=None, metavar="D", help="Fock truncation degree")
    v.add_argument("--tol", type=float, default=None, help="override each check's tolerance")
    v.add_argument("--format", choices=("json", "text"), default="text")
    v.add_argument("--out", type=Path, default=None, metavar="PATH")

    r = sub.add_parser("reduce", help="print the normal-form kernel of a DSL expression")
    r.add_argument("--expr", type=Path, required=True, metavar="FILE")
    return p


def _json_safe(rec: dict) -> dict:
    # JSON has no infinity; a missing residual is reported as null
    if not math.isfinite(rec["residual"]):
        rec = dict(rec, residual=None)
    return rec


def format_report(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([_json_safe(r) for r in records], sort_keys=True, indent=2) + "\n"
    lines = []
    for r in records:
        p = r["params"]
        line = (f"{r['status'].upper():4s}  {r['check']:<40s} n={p['n']} seed={p['seed']} "
                f"D={p['D']} residual={r['residual']:.3e} tol={p['tol']:g}")
        if r.get("detail"):
            line += f"  [{r['detail']}]"
        lines.append(line)
    npass = sum(r["status"] == "pass" for r in records)
    lines.append(f"{npass}/{len(records)} passed")
    return "\n".join(lines) + "\n"


def verify(names: list[str], ns: list[int], seed: int, trunc=None, tol=None) -> list[dict]:
    """Run checks and return JSON records ordered by check name, then n."""
    return [run_check(name, n, seed, D=trunc, tol=tol).record()
            for name in sorted(set(names)) for n in ns]


def _cmd_verify(args) -> int:
    if args.list:
        for name in sorted(CHECKS):
            print(f"{name:<40s} {CHECKS[name].paper_ref}")
        return EXIT_OK
    names = sorted(CHECKS) if args.all else args.check
    unknown = [x for x in names if x not in CHECKS]
    if unknown:
        print(f"unknown check(s): {', '.join(unknown)}; use --list", file=sys.stderr)
        return EXIT_USAGE
    records = verify(names, args.n, args.seed, args.trunc, args.tol)
    text = format_report(records, args.format)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r["status"] == "pass" for r in records) else EXIT_FAIL


def normal_form_expr(nf: Poly):
    """Operator expression for a left normal form: b-words applied to ``(kernel HEAD)``.

    Dummies shared between a word and its head become plain names bound by ``sumover``.
    """
    parts = []
    for term, c in nf.items():
        taken = set(term_labels(term))
        names, k = {}, 0
        for lab in term_labels(term):
            if is_dummy(lab) and lab not in names:
                while f"s{k}" in taken:
                    k += 1
                names[lab] = f"s{k}"
                k += 1
        term = [relabel_factor(f, names) for f in term]
        e = ex.LeafKernel(Poly.from_terms([([f for f in term if f[0] != "B"], c)]))
        for f in term:
            if f[0] == "B":
                e = ex.ApplyB(f[1], e)
        parts.append(ex.SumOver(tuple(names.values()), e) if names else e)
    if not parts:
        return ex.LeafKernel(Poly())
    return parts[0] if len(parts) == 1 else ex.Sum(tuple(parts))


def reduce_text(text: str) -> tuple[str, str]:
    """Evaluate DSL text; return its Fock normal form as DSL and as math text."""
    nf = kc.left_normal_form(ex.evaluate(parse(text)))
    return render(normal_form_expr(nf)), render_poly_math(nf)


def _cmd_reduce(args) -> int:
    try:
        text = args.expr.read_text(encoding="utf-8")
    except OSError as e:
        print(f"cannot read {args.expr}: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        dsl_text, math_text = reduce_text(text)
    except DslError as e:
        print(f"{args.expr}:{e}", file=sys.stderr)
        return EXIT_USAGE
    except ex.ExprError as e:
        print(f"{args.expr}: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(dsl_text)
    print(math_text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return _cmd_verify(args)
    return _cmd_reduce(args)


if __name__ == "__main__":
    sys.exit(main())
