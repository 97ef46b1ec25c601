"""Operator expressions and their symbolic evaluation to kernels.

Expressions apply right-to-left onto a leaf: ``ApplyB("j", Mul("z", "s", LeafP()))``
is b_j applied to z_s P.  A tree ending at :class:`LeafI` (the identity
operator) is *open*: it has no polynomial kernel by itself, but composing a
kernel with it on the left is evaluated by right actions on Z'.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import kernel as kc
from .scalar import PI, as_scalar
from .tensor import Poly

__all__ = [
    "LeafP",
    "LeafI",
    "LeafKernel",
    "ApplyB",
    "ApplyBplus",
    "MultiplyVar",
    "Deriv",
    "Scale",
    "Project",
    "Offdiag",
    "Inv",
    "Adjoint",
    "Compose",
    "Sum",
    "SumOver",
    "OperatorExpr",
    "evaluate",
    "is_open",
    "substitute_leaf",
    "ExprError",
]


class ExprError(ValueError):
    pass


@dataclass(frozen=True)
class LeafP:
    pass


@dataclass(frozen=True)
class LeafI:
    pass


@dataclass(frozen=True)
class LeafKernel:
    poly: Poly


@dataclass(frozen=True)
class ApplyB:
    label: str
    child: "OperatorExpr"


@dataclass(frozen=True)
class ApplyBplus:
    label: str
    child: "OperatorExpr"


@dataclass(frozen=True)
class MultiplyVar:
    kind: str  # "z" or "zb"
    label: str
    child: "OperatorExpr"


@dataclass(frozen=True)
class Deriv:
    """Partial derivative d/dz_label (kind "z") or d/dzbar_label (kind "zb")."""

    kind: str
    label: str
    child: "OperatorExpr"


@dataclass(frozen=True)
class Scale:
    """Multiplication by a polynomial in tensors and unprimed variables."""

    poly: Poly
    child: "OperatorExpr"


@dataclass(frozen=True)
class Project:
    child: "OperatorExpr"


@dataclass(frozen=True)
class Offdiag:
    child: "OperatorExpr"


@dataclass(frozen=True)
class Inv:
    """L^{-k} P^perp."""

    power: int
    child: "OperatorExpr"


@dataclass(frozen=True)
class Adjoint:
    child: "OperatorExpr"


@dataclass(frozen=True)
class Compose:
    left: "OperatorExpr"
    right: "OperatorExpr"


@dataclass(frozen=True)
class Sum:
    children: tuple


@dataclass(frozen=True)
class SumOver:
    """Sum of ``child`` over the listed labels, each running over 1..n."""

    labels: tuple
    child: "OperatorExpr"


OperatorExpr = Union[
    LeafP, LeafI, LeafKernel, ApplyB, ApplyBplus, MultiplyVar, Deriv, Scale,
    Project, Offdiag, Inv, Adjoint, Compose, Sum, SumOver,
]

_UNARY = (ApplyB, ApplyBplus, MultiplyVar, Deriv, Scale, Project, Offdiag, Inv, Adjoint, SumOver)


def _with_child(e, child):
    if isinstance(e, (ApplyB, ApplyBplus)):
        return type(e)(e.label, child)
    if isinstance(e, (MultiplyVar, Deriv)):
        return type(e)(e.kind, e.label, child)
    if isinstance(e, Scale):
        return Scale(e.poly, child)
    if isinstance(e, Inv):
        return Inv(e.power, child)
    if isinstance(e, SumOver):
        return SumOver(e.labels, child)
    return type(e)(child)


def is_open(e) -> bool:
    """True when the expression is an operator ending at the identity leaf."""
    if isinstance(e, LeafI):
        return True
    if isinstance(e, (LeafP, LeafKernel)):
        return False
    if isinstance(e, _UNARY):
        return is_open(e.child)
    if isinstance(e, Compose):
        return is_open(e.left) and is_open(e.right)
    if isinstance(e, Sum):
        flags = {is_open(c) for c in e.children}
        if len(flags) > 1:
            raise ExprError("sum mixes kernels and open operators")
        return flags.pop() if flags else False
    raise ExprError(f"unknown expression node {type(e).__name__}")


def substitute_leaf(e, leaf):
    """Replace every identity leaf of an open expression by ``leaf``."""
    if isinstance(e, LeafI):
        return leaf
    if isinstance(e, (LeafP, LeafKernel)):
        return e
    if isinstance(e, _UNARY):
        return _with_child(e, substitute_leaf(e.child, leaf))
    if isinstance(e, Compose):
        # only the rightmost identity is the input slot
        return Compose(e.left, substitute_leaf(e.right, leaf)) if is_open(e.right) else e
    if isinstance(e, Sum):
        return Sum(tuple(substitute_leaf(c, leaf) for c in e.children))
    raise ExprError(f"unknown expression node {type(e).__name__}")


_HALF = as_scalar(1) / 2


def _deriv_left(K: Poly, kind: str, label: str) -> Poly:
    # d/dz_j = (pi zb_j - b_j)/2 and d/dzb_j = (b_j^+ - pi z_j)/2
    if kind == "z":
        out = kc.mul_var(K, "zb", label).scale(PI) - kc.apply_b(K, label)
    elif kind == "zb":
        out = kc.apply_bplus(K, label) - kc.mul_var(K, "z", label).scale(PI)
    else:
        raise ExprError(f"derivative kind must be z or zb, got {kind!r}")
    return out.scale(_HALF)


def _deriv_right(K: Poly, kind: str, label: str) -> Poly:
    if kind == "z":
        out = kc.mul_var(K, "zbp", label).scale(PI) - kc.right_b(K, label)
    elif kind == "zb":
        out = kc.right_bplus(K, label) - kc.mul_var(K, "zp", label).scale(PI)
    else:
        raise ExprError(f"derivative kind must be z or zb, got {kind!r}")
    return out.scale(_HALF)


def _check_kind(kind: str) -> None:
    if kind not in ("z", "zb"):
        raise ExprError(f"multiplication kind must be z or zb, got {kind!r}")


def _check_scale_poly(poly: Poly) -> None:
    for term, _ in poly.items():
        for f in term:
            if f[0] == "v" and f[1] in ("zp", "zbp"):
                raise ExprError("scale polynomials may not contain primed variables")


def _to_primed(poly: Poly) -> Poly:
    prime = {"z": "zp", "zb": "zbp"}
    return poly.map_terms(
        lambda t, c: [([("v", prime[f[1]], f[2]) if f[0] == "v" else f for f in t], c)]
    )


def evaluate(e) -> Poly:
    """Kernel polynomial of a closed expression."""
    if isinstance(e, LeafP):
        return kc.P
    if isinstance(e, LeafKernel):
        return e.poly
    if isinstance(e, LeafI):
        raise ExprError("the identity operator has no polynomial kernel")
    if isinstance(e, Compose):
        if is_open(e.right):
            return _right_apply(evaluate(e.left), e.right)
        if is_open(e.left):
            return evaluate(substitute_leaf(e.left, LeafKernel(evaluate(e.right))))
        return kc.compose(evaluate(e.left), evaluate(e.right))
    if isinstance(e, Sum):
        out = Poly()
        for c in e.children:
            out = out + evaluate(c)
        return out
    K = evaluate(e.child)
    if isinstance(e, ApplyB):
        return kc.apply_b(K, e.label)
    if isinstance(e, ApplyBplus):
        return kc.apply_bplus(K, e.label)
    if isinstance(e, MultiplyVar):
        _check_kind(e.kind)
        return kc.mul_var(K, e.kind, e.label)
    if isinstance(e, Deriv):
        return _deriv_left(K, e.kind, e.label)
    if isinstance(e, Scale):
        _check_scale_poly(e.poly)
        return kc.mul_poly(K, e.poly)
    if isinstance(e, Project):
        return kc.project_ker(K)
    if isinstance(e, Offdiag):
        return kc.offdiag(K)
    if isinstance(e, Inv):
        return kc.apply_inv_offdiag(K, e.power)
    if isinstance(e, Adjoint):
        return kc.adjoint(K)
    if isinstance(e, SumOver):
        for lab in e.labels:
            K = K.sum_over(lab)
        return K
    raise ExprError(f"unknown expression node {type(e).__name__}")


def _right_apply(K: Poly, e) -> Poly:
    """Kernel of K o X for an open expression X."""
    if isinstance(e, LeafI):
        return K
    if isinstance(e, Sum):
        out = Poly()
        for c in e.children:
            out = out + _right_apply(K, c)
        return out
    if isinstance(e, Compose):
        return _right_apply(_right_apply(K, e.left), e.right)
    if isinstance(e, Adjoint):
        # K o X^* = (X o K^*)^*
        inner = evaluate(substitute_leaf(e.child, LeafKernel(kc.adjoint(K))))
        return kc.adjoint(inner)
    if isinstance(e, SumOver):
        out = _right_apply(K, e.child)
        for lab in e.labels:
            out = out.sum_over(lab)
        return out
    if isinstance(e, ApplyB):
        K = kc.right_b(K, e.label)
    elif isinstance(e, ApplyBplus):
        K = kc.right_bplus(K, e.label)
    elif isinstance(e, MultiplyVar):
        _check_kind(e.kind)
        K = kc.mul_var(K, "zp" if e.kind == "z" else "zbp", e.label)
    elif isinstance(e, Deriv):
        K = _deriv_right(K, e.kind, e.label)
    elif isinstance(e, Scale):
        _check_scale_poly(e.poly)
        K = _to_primed(e.poly) * K
    elif isinstance(e, Project):
        K = kc.right_project(K)
    elif isinstance(e, Offdiag):
        K = K - kc.right_project(K)
    elif isinstance(e, Inv):
        K = kc.right_inv_offdiag(K, e.power)
    else:
        raise ExprError(f"unknown expression node {type(e).__name__}")
    return _right_apply(K, e.child)
