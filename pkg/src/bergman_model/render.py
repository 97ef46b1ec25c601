"""Text renderings of scalars and polynomials.

Two formats: a compact math-like text for humans and the DSL poly syntax,
which :mod:`bergman_model.dsl` parses back to the identical :class:`Poly`.
"""

from __future__ import annotations

from fractions import Fraction

from .scalar import ExactScalar
from .tensor import Poly

__all__ = ["render_poly_math", "render_poly_dsl", "render_scalar_dsl", "render_factor_math"]

_VAR_MATH = {"z": "z", "zb": "z̄", "zp": "z'", "zbp": "z̄'"}


def _label_math(label: str, bar: bool = False) -> str:
    return label + ("̄" if bar else "")


def render_factor_math(f) -> str:
    tag = f[0]
    if tag == "T":
        if f[1] == "Phi":
            return "Φ"
        return f"{f[1]}[{','.join(_label_math(l, b) for l, b in f[2])}]"
    if tag == "d":
        return f"δ[{f[1]},{f[2]}]"
    if tag == "v":
        return f"{_VAR_MATH[f[1]]}[{f[2]}]"
    if tag == "B":
        return f"b[{f[1]}]"
    return f"∘b⁺[{f[1]}]"


def render_poly_math(poly: Poly) -> str:
    """Human-readable text, e.g. ``(2+0i)·π^1 J[#0,#1,i] z[#0]``."""
    if poly.is_zero():
        return "0"
    parts = []
    for term, c in poly.items():
        coeff = str(c)
        if len(c.terms) > 1:
            coeff = f"[{coeff}]"
        body = " ".join(render_factor_math(f) for f in term)
        parts.append(f"{coeff} {body}".rstrip())
    return " + ".join(parts)


def _rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_scalar_dsl(c: ExactScalar) -> str:
    if c.is_zero():
        return "0"
    parts = []
    for (pk, nk), (re_, im_) in sorted(c.terms.items()):
        if re_ and im_:
            g = f"(+ {_rat(re_)} (* {_rat(im_)} I))"
        elif im_:
            g = f"(* {_rat(im_)} I)"
        else:
            g = _rat(re_)
        extra = []
        if pk:
            extra.append(f"(^ pi {pk})")
        if nk:
            extra.append(f"(^ n {nk})")
        parts.append(f"(* {g} {' '.join(extra)})" if extra else g)
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def _factor_dsl(f) -> str:
    tag = f[0]
    if tag == "T":
        slots = " ".join(l + ("~" if b else "") for l, b in f[2])
        return f"({f[1]} {slots})" if slots else f"({f[1]})"
    if tag == "d":
        return f"(delta {f[1]} {f[2]})"
    if tag == "v":
        return f"({f[1]} {f[2]})"
    raise ValueError("pending operator factors have no poly syntax")


def render_poly_dsl(poly: Poly) -> str:
    """DSL poly text; ``parse_poly(render_poly_dsl(p)) == p``."""
    if poly.is_zero():
        return "0"
    terms = []
    for term, c in poly.items():
        items = [render_scalar_dsl(c)] + [_factor_dsl(f) for f in term]
        terms.append(items[0] if len(items) == 1 else f"(* {' '.join(items)})")
    return terms[0] if len(terms) == 1 else f"(+ {' '.join(terms)})"
