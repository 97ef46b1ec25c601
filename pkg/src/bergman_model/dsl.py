"""S-expression syntax for operator expressions and kernel polynomials.

Operator forms (application is right-to-left onto the last argument)::

    P | I | (kernel POLY) | (b L X) | (bplus L X) | (mul KIND L X) | (d KIND L X)
    (scale POLY X) | (project X) | (offdiag X) | (inv K X) | (adjoint X)
    (compose X Y ...) | (sum X ...) | (sumover (L ...) X)

Poly forms::

    INT | a/b | I | pi | n | (+ ...) | (* ...) | (- A [B ...]) | (^ A INT)
    (J a b c) | (R a b c d) | (DDJ a b c d) | (Phi) | (delta a b)
    (z a) | (zb a) | (zp a) | (zbp a)

Index labels: digits are concrete values, ``#name`` is a summed dummy, other
names are free.  A trailing ``~`` on a tensor slot marks it barred.
Einstein convention: a free name used in two or more places of an operator
expression is summed over the whole expression, and a free name repeated
inside one term of a poly (and not bound outside it) is summed in that term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .render import render_poly_dsl
from .scalar import I, N, ONE, PI, ExactScalar
from .tensor import (
    FAMILY_ARITY, Poly, delta, is_concrete, is_dummy, relabel_factor, tensor, term_labels, var,
)

__all__ = ["DslError", "parse", "parse_poly", "render"]


class DslError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col = line, col


@dataclass
class _Atom:
    text: str
    line: int
    col: int


@dataclass
class _List:
    items: list
    line: int
    col: int


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def _read(text: str):
    stack: list[_List] = [_List([], 1, 1)]
    line, col = 1, 1
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if tok == "(":
            stack.append(_List([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise DslError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].items.append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].items.append(_Atom(tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
    if len(stack) > 1:
        open_ = stack[-1]
        raise DslError("unbalanced '(' (missing ')')", open_.line, open_.col)
    top = stack[0].items
    if len(top) != 1:
        where = top[1] if len(top) > 1 else stack[0]
        raise DslError(f"expected exactly one expression, found {len(top)}", where.line, where.col)
    return top[0]


_LABEL = re.compile(r"^(#?[A-Za-z_][A-Za-z0-9_]*|#?\d+)$")


def _label(node, allow_bar=False):
    if not isinstance(node, _Atom):
        raise DslError("expected an index label", node.line, node.col)
    text, bar = node.text, False
    if allow_bar and text.endswith("~"):
        text, bar = text[:-1], True
    if not _LABEL.match(text):
        raise DslError(f"bad index label {node.text!r}", node.line, node.col)
    return (text, bar) if allow_bar else text


def _head(node):
    if not isinstance(node, _List) or not node.items or not isinstance(node.items[0], _Atom):
        raise DslError("expected a form", node.line, node.col)
    return node.items[0].text


def _arity(node, k, form):
    got = len(node.items) - 1
    if got != k:
        raise DslError(f"'{form}' takes {k} argument(s), got {got}", node.line, node.col)


# -- poly parsing ------------------------------------------------------------
# raw polys are lists of (factor list, scalar); products concatenate factors so
# explicit dummies keep their links across a whole term

def _raw_mul(a, b):
    return [(fa + fb, ca * cb) for fa, ca in a for fb, cb in b]


def _raw_const(c):
    return [([], c)]


_VARS = ("z", "zb", "zp", "zbp")


def _poly_raw(node):
    if isinstance(node, _Atom):
        t = node.text
        if t == "I":
            return _raw_const(I)
        if t == "pi":
            return _raw_const(PI)
        if t == "n":
            return _raw_const(N)
        try:
            return _raw_const(ExactScalar.const(Fraction(t)))
        except (ValueError, ZeroDivisionError):
            raise DslError(f"unknown poly atom {t!r}", node.line, node.col) from None
    head = _head(node)
    args = node.items[1:]
    if head == "+":
        out = []
        for a in args:
            out += _poly_raw(a)
        return out
    if head == "*":
        out = _raw_const(ONE)
        for a in args:
            out = _raw_mul(out, _poly_raw(a))
        return out
    if head == "-":
        if not args:
            raise DslError("'-' needs at least one argument", node.line, node.col)
        first = _poly_raw(args[0])
        if len(args) == 1:
            return [(f, -c) for f, c in first]
        out = list(first)
        for a in args[1:]:
            out += [(f, -c) for f, c in _poly_raw(a)]
        return out
    if head == "^":
        _arity(node, 2, "^")
        base = _poly_raw(args[0])
        k_node = args[1]
        if not isinstance(k_node, _Atom) or not re.match(r"^-?\d+$", k_node.text):
            raise DslError("exponent must be an integer", k_node.line, k_node.col)
        k = int(k_node.text)
        if k < 0:
            if len(base) != 1 or base[0][0]:
                raise DslError("negative powers need a scalar monomial base", node.line, node.col)
            try:
                return _raw_const(base[0][1] ** k)
            except ZeroDivisionError as err:
                raise DslError(str(err), node.line, node.col) from None
        out = _raw_const(ONE)
        for _ in range(k):
            out = _raw_mul(out, base)
        return out
    if head in FAMILY_ARITY:
        _arity(node, FAMILY_ARITY[head], head)
        return [([tensor(head, *[_label(a, allow_bar=True) for a in args])], ONE)]
    if head == "delta":
        _arity(node, 2, "delta")
        return [([delta(_label(args[0]), _label(args[1]))], ONE)]
    if head in _VARS:
        _arity(node, 1, head)
        return [([var(head, _label(args[0]))], ONE)]
    raise DslError(f"unknown poly form {head!r}", node.line, node.col)


def _letters(raw) -> set[str]:
    return {l for f, _ in raw for l in term_labels(f) if not is_dummy(l) and not is_concrete(l)}


def _finish_poly(raw, bound: frozenset) -> Poly:
    items = []
    for factors, c in raw:
        labs = term_labels(factors)
        mapping = {}
        for l in sorted(set(labs)):
            if not is_dummy(l) and not is_concrete(l) and l not in bound and labs.count(l) > 1:
                mapping[l] = "#e_" + l
        if mapping:
            factors = [relabel_factor(f, mapping) for f in factors]
        items.append((factors, c))
    return Poly.from_terms(items)


def parse_poly(text: str, bound=frozenset()) -> Poly:
    return _finish_poly(_poly_raw(_read(text)), frozenset(bound))


# -- operator parsing --------------------------------------------------------

_UNARY_FORMS = {"project": ex.Project, "offdiag": ex.Offdiag, "adjoint": ex.Adjoint}


def _count_places(node, bound: frozenset, counts: dict) -> None:
    """Count, per unbound free label, the number of places that mention it."""
    if isinstance(node, _Atom):
        return
    head = _head(node)
    args = node.items[1:]

    def note(labels):
        for l in labels:
            if l not in bound:
                counts[l] = counts.get(l, 0) + 1

    if head in ("b", "bplus") and len(args) == 2:
        note(_free([_label(args[0])]))
        _count_places(args[1], bound, counts)
    elif head in ("mul", "d") and len(args) == 3:
        note(_free([_label(args[1])]))
        _count_places(args[2], bound, counts)
    elif head == "kernel" and len(args) == 1:
        note(_letters(_poly_raw(args[0])))
    elif head == "scale" and len(args) == 2:
        note(_letters(_poly_raw(args[0])))
        _count_places(args[1], bound, counts)
    elif head == "sumover" and len(args) == 2 and isinstance(args[0], _List):
        inner = bound | {_label(a) for a in args[0].items}
        _count_places(args[1], inner, counts)
    elif head == "inv":
        for a in args[1:]:
            _count_places(a, bound, counts)
    else:
        for a in args:
            _count_places(a, bound, counts)


def _free(labels):
    return [l for l in labels if not is_dummy(l) and not is_concrete(l)]


def _op_label(node):
    lab = _label(node)
    if is_dummy(lab):
        raise DslError("operator indices cannot be '#' dummies; use sumover", node.line, node.col)
    return lab


def _build(node, bound: frozenset):
    if isinstance(node, _Atom):
        if node.text == "P":
            return ex.LeafP()
        if node.text == "I":
            return ex.LeafI()
        raise DslError(f"unknown operator atom {node.text!r}", node.line, node.col)
    head = _head(node)
    args = node.items[1:]
    if head == "kernel":
        _arity(node, 1, head)
        return ex.LeafKernel(_finish_poly(_poly_raw(args[0]), bound))
    if head in ("b", "bplus"):
        _arity(node, 2, head)
        cls = ex.ApplyB if head == "b" else ex.ApplyBplus
        return cls(_op_label(args[0]), _build(args[1], bound))
    if head in ("mul", "d"):
        _arity(node, 3, head)
        kind = args[0]
        if not isinstance(kind, _Atom) or kind.text not in ("z", "zb"):
            raise DslError("kind must be z or zb", kind.line, kind.col)
        cls = ex.MultiplyVar if head == "mul" else ex.Deriv
        return cls(kind.text, _op_label(args[1]), _build(args[2], bound))
    if head == "scale":
        _arity(node, 2, head)
        poly = _finish_poly(_poly_raw(args[0]), bound)
        if any(f[0] == "v" and f[1] in ("zp", "zbp") for t, _ in poly.items() for f in t):
            raise DslError("scale polynomials may not contain primed variables", node.line, node.col)
        return ex.Scale(poly, _build(args[1], bound))
    if head in _UNARY_FORMS:
        _arity(node, 1, head)
        return _UNARY_FORMS[head](_build(args[0], bound))
    if head == "inv":
        _arity(node, 2, head)
        k = args[0]
        if not isinstance(k, _Atom) or not k.text.isdigit() or int(k.text) < 1:
            raise DslError("inv power must be a positive integer", k.line, k.col)
        return ex.Inv(int(k.text), _build(args[1], bound))
    if head == "compose":
        if len(args) < 2:
            raise DslError("'compose' takes at least 2 arguments", node.line, node.col)
        parts = [_build(a, bound) for a in args]
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = ex.Compose(p, out)
        return out
    if head == "sum":
        if not args:
            raise DslError("'sum' takes at least 1 argument", node.line, node.col)
        return ex.Sum(tuple(_build(a, bound) for a in args))
    if head == "sumover":
        _arity(node, 2, head)
        if not isinstance(args[0], _List):
            raise DslError("sumover expects a label list", args[0].line, args[0].col)
        labels = tuple(_op_label(a) for a in args[0].items)
        if any(is_concrete(l) for l in labels):
            raise DslError("sumover labels must be names", args[0].line, args[0].col)
        return ex.SumOver(labels, _build(args[1], bound | set(labels)))
    raise DslError(f"unknown form {head!r}", node.line, node.col)


def parse(text: str, free=()):
    """Parse DSL text into an operator expression.

    Labels listed in ``free`` stay free even when repeated.
    """
    root = _read(text)
    counts: dict[str, int] = {}
    fixed = frozenset(free)
    _count_places(root, fixed, counts)
    auto = tuple(sorted(l for l, k in counts.items() if k >= 2))
    out = _build(root, frozenset(auto) | fixed)
    return ex.SumOver(auto, out) if auto else out


# -- rendering ---------------------------------------------------------------

def render(e) -> str:
    """DSL text of an operator expression; ``parse(render(e)) == e``."""
    if isinstance(e, ex.LeafP):
        return "P"
    if isinstance(e, ex.LeafI):
        return "I"
    if isinstance(e, ex.LeafKernel):
        return f"(kernel {render_poly_dsl(e.poly)})"
    if isinstance(e, ex.ApplyB):
        return f"(b {e.label} {render(e.child)})"
    if isinstance(e, ex.ApplyBplus):
        return f"(bplus {e.label} {render(e.child)})"
    if isinstance(e, ex.MultiplyVar):
        return f"(mul {e.kind} {e.label} {render(e.child)})"
    if isinstance(e, ex.Deriv):
        return f"(d {e.kind} {e.label} {render(e.child)})"
    if isinstance(e, ex.Scale):
        return f"(scale {render_poly_dsl(e.poly)} {render(e.child)})"
    if isinstance(e, ex.Project):
        return f"(project {render(e.child)})"
    if isinstance(e, ex.Offdiag):
        return f"(offdiag {render(e.child)})"
    if isinstance(e, ex.Inv):
        return f"(inv {e.power} {render(e.child)})"
    if isinstance(e, ex.Adjoint):
        return f"(adjoint {render(e.child)})"
    if isinstance(e, ex.Compose):
        return f"(compose {render(e.left)} {render(e.right)})"
    if isinstance(e, ex.Sum):
        return f"(sum {' '.join(render(c) for c in e.children)})"
    if isinstance(e, ex.SumOver):
        return f"(sumover ({' '.join(e.labels)}) {render(e.child)})"
    raise TypeError(f"cannot render {type(e).__name__}")
