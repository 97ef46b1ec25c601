"""Regression table of kernel reduction rules.

Each rule pairs an engine computation with a hand-transcribed expected value.
Expected values are only ever compared against, never fed into a computation.
Relations:

* ``exact``: full kernels agree;
* ``approx`` / ``sim``: the parts tracked by :func:`kernel.restrict` agree;
* ``unprimed``: the kernels agree at Z' = 0;
* ``origin``: the constant terms agree;
* ``two-form``: the diagonal two-forms agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import expr as ex
from . import kernel as kc
from .dsl import parse, parse_poly
from .tensor import Poly, expand_concrete

__all__ = ["Rule", "RULES", "rule_by_name", "evaluate_rule"]

Side = Union[str, Callable[[], object]]


@dataclass(frozen=True)
class Rule:
    name: str
    ref: str
    lhs: Side
    rhs: Side
    relation: str = "exact"
    free: tuple = ()


def _side(side: Side, free) -> object:
    if callable(side):
        return side()
    return ex.evaluate(parse(side, free=free))


def _two_form(lhs) -> kc.TwoForm:
    return kc.diagonal_two_form(lhs)


def _reduce(K: Poly, relation: str) -> Poly:
    if relation in ("approx", "sim"):
        return kc.restrict(K, relation)
    if relation == "unprimed":
        return K.filter(lambda t: not any(f[0] == "v" and f[1] in ("zp", "zbp") for f in t))
    if relation == "origin":
        return kc.eval_origin(K)
    return K


def _numeric_gap(diff: Poly, free, n: int, assign) -> float:
    worst = 0.0
    for vals in np.ndindex(*(n,) * len(free)):
        values = {l: v + 1 for l, v in zip(free, vals)}
        coeffs = expand_concrete(diff, assign, values)
        if coeffs:
            worst = max(worst, max(abs(c) for c in coeffs.values()))
    return worst


def evaluate_rule(rule: Rule, n: int = 2, assign=None) -> tuple[bool, float]:
    """Return (symbolically equal, numeric residual at dimension n)."""
    lhs = _side(rule.lhs, rule.free)
    rhs = _side(rule.rhs, rule.free)
    if rule.relation == "two-form":
        tl = lhs if isinstance(lhs, kc.TwoForm) else _two_form(lhs)
        diffs = [tl.mixed - rhs.mixed, tl.holo - rhs.holo, tl.antiholo - rhs.antiholo]
        free = tuple(rule.free) + (kc.R_LABEL, kc.Q_LABEL)
    else:
        diffs = [_reduce(lhs, rule.relation) - _reduce(rhs, rule.relation)]
        free = tuple(rule.free)
    if all(d.is_zero() for d in diffs):
        return True, 0.0
    if assign is None:
        from .sampler import sample_admissible
        assign = sample_admissible(n, 0)
    return False, max(_numeric_gap(d, free, n, assign) for d in diffs)


def _tf(mixed="0", holo="0", antiholo="0", free=()):
    bound = frozenset(free) | {kc.R_LABEL, kc.Q_LABEL}
    return lambda: kc.TwoForm(parse_poly(mixed, bound), parse_poly(holo, bound), parse_poly(antiholo, bound))


def _model(name):
    def get():
        from .model import kernel_of
        return kernel_of(name)
    return get


def _adjoint_a():
    from .model import kernel_of
    return kc.adjoint(kernel_of("A"))


_ZB = "(- (zb {0}) (zbp {0}))"


def _d(a):
    return _ZB.format(a)


RULES: tuple[Rule, ...] = (
    Rule("rule-bplus-kills-projector", "b_j^+ annihilates the projector kernel",
         "(bplus j P)", "(kernel 0)", free=("j",)),
    Rule("rule-b-on-projector", "b_j applied to the projector kernel",
         "(b j P)", f"(kernel (* 2 pi {_d('j')}))", free=("j",)),
    Rule("rule-projection-keeps-empty-word", "projection onto the kernel of L keeps empty b-words",
         "(project (mul z s (mul z t P)))", "(kernel (* (z s) (z t)))", free=("s", "t")),
    Rule("rule-projection-kills-b-words", "projection onto the kernel of L kills nonempty b-words",
         "(project (b i (b j (mul z s (mul z t P)))))", "(kernel 0)", free=("i", "j", "s", "t")),
    Rule("rule-inverse-bplus-bb-word", "inverse Laplacian of z z b^+ b b acting on P",
         "(inv 1 (mul z s (mul z t (bplus i (b j (b k P))))))",
         "(sum (scale (delta i j) (b k (mul z s (mul z t P))))"
         " (scale (delta i k) (b j (mul z s (mul z t P)))))",
         free=("i", "j", "k", "s", "t")),
    Rule("rule-quartic-normal-form", "normal form of zbar zbar z z P at Z' = 0",
         "(kernel (* (zb s) (zb t) (z j) (z k)))",
         "(scale (* 1/4 (^ pi -2)) (sum (b s (b t (mul z j (mul z k P))))"
         " (scale (* 2 (delta j s)) (b t (mul z k P))) (scale (* 2 (delta j t)) (b s (mul z k P)))"
         " (scale (* 2 (delta k s)) (b t (mul z j P))) (scale (* 2 (delta k t)) (b s (mul z j P)))"
         " (kernel (+ (* 4 (delta j t) (delta k s)) (* 4 (delta j s) (delta k t))))))",
         relation="unprimed", free=("j", "k", "s", "t")),
    Rule("rule-projector-quartic-at-origin", "P composed with zbar zbar z z P, value at the origin",
         "(compose P (kernel (* (zb s) (zb t) (z j) (z k))))",
         "(kernel (* (^ pi -2) (+ (* (delta j t) (delta k s)) (* (delta j s) (delta k t)))))",
         relation="origin", free=("j", "k", "s", "t")),
    Rule("rule-z-zbar-normal-form", "normal form of z zbar P",
         "(kernel (* (z s) (zb t)))",
         "(sum (scale (* 1/2 (^ pi -1)) (b t (mul z s P)))"
         " (kernel (+ (* (^ pi -1) (delta s t)) (* (z s) (zbp t)))))",
         free=("s", "t")),
    Rule("rule-inverse-bb-zbar-zbar", "inverse Laplacian of b b zbar zbar P",
         "(scale (* 4 (^ pi 2)) (inv 1 (b i (b j (mul zb s (mul zb t P))))))",
         "(sum (scale (* 1/16 (^ pi -1)) (b i (b j (b s (b t P)))))"
         " (scale 1/6 (b i (b j (b s (kernel (zbp t))))))"
         " (scale 1/6 (b i (b j (b t (kernel (zbp s))))))"
         " (scale (* 1/2 pi) (b i (b j (kernel (* (zbp s) (zbp t)))))))",
         free=("i", "j", "s", "t")),
    Rule("rule-pure-curvature-piece-untracked", "the pure antiholomorphic curvature piece has no tracked part",
         _model("I27"), "(kernel 0)", relation="approx"),
    Rule("rule-bb-on-projector", "b b applied to P",
         "(b i (b j P))", f"(kernel (* 4 (^ pi 2) {_d('i')} {_d('j')}))", free=("i", "j")),
    Rule("rule-bb-on-z-zbarprime", "b b applied to z zbar' P",
         "(b i (b j (kernel (* (z s) (zbp t)))))",
         f"(kernel (+ (* -4 pi (delta j s) (zbp t) {_d('i')}) (* -4 pi (delta i s) (zbp t) {_d('j')})"
         f" (* 4 (^ pi 2) (z s) (zbp t) {_d('i')} {_d('j')})))",
         free=("i", "j", "s", "t")),
    Rule("rule-bb-on-z-z", "b b applied to z z P",
         "(b i (b j (mul z s (mul z t P))))",
         f"(kernel (+ (* 4 (delta i t) (delta j s)) (* -4 pi (delta j s) (z t) {_d('i')})"
         f" (* 4 (delta j t) (delta i s)) (* -4 pi (delta j t) (z s) {_d('i')})"
         f" (* -4 pi (delta i s) (z t) {_d('j')}) (* -4 pi (delta i t) (z s) {_d('j')})"
         f" (* 4 (^ pi 2) (z s) (z t) {_d('j')} {_d('i')})))",
         free=("i", "j", "s", "t")),
    Rule("rule-bbb-on-z", "b b b applied to z P",
         "(b i (b j (b t (mul z s P))))",
         "(sum (scale (* -2 (delta t s)) (b i (b j P))) (scale (* -2 (delta j s)) (b i (b t P)))"
         " (scale (* -2 (delta i s)) (b j (b t P))) (mul z s (b i (b j (b t P)))))",
         free=("i", "j", "s", "t")),
    Rule("rule-bb-two-form-vanishes", "b b P has no diagonal two-form",
         "(b i (b j P))", _tf(free=("i", "j")), relation="two-form", free=("i", "j")),
    Rule("rule-bbb-z-two-form-vanishes", "b b b z P has no diagonal two-form",
         "(b i (b j (b t (mul z s P))))", _tf(free=("i", "j", "s", "t")),
         relation="two-form", free=("i", "j", "s", "t")),
    Rule("rule-inverse-b-z", "inverse Laplacian of b z P",
         "(inv 1 (b j (mul z s P)))",
         f"(kernel (* 1/4 (^ pi -1) (+ (* -2 (delta j s)) (* 2 pi (z s) {_d('j')}))))",
         free=("j", "s")),
    Rule("rule-inverse-b-zbar", "inverse Laplacian of b zbar P",
         "(inv 1 (b j (mul zb s P)))",
         f"(kernel (+ (* 1/4 {_d('j')} {_d('s')}) (* 1/2 (zbp s) {_d('j')})))",
         free=("j", "s")),
    Rule("rule-inverse-b-zbar-two-form", "two-form of the inverse Laplacian of b zbar P",
         "(inv 1 (b j (mul zb s P)))",
         _tf(antiholo="(* 1/4 (- (* (delta j r) (delta s q)) (* (delta j q) (delta s r))))", free=("j", "s")),
         relation="two-form", free=("j", "s")),
    Rule("rule-offdiag-z-zbar", "complementary projection of z zbar P",
         "(offdiag (kernel (* (z j) (zb k))))",
         f"(kernel (+ (* -1 (^ pi -1) (delta j k)) (* (z j) {_d('k')})))", free=("j", "k")),
    Rule("rule-offdiag-zbar-zbar", "complementary projection of zbar zbar P",
         "(offdiag (kernel (* (zb j) (zb k))))",
         "(kernel (- (* (zb j) (zb k)) (* (zbp j) (zbp k))))", free=("j", "k")),
    Rule("rule-inverse-z-z-b", "inverse Laplacian of z z b P",
         "(inv 1 (mul z i (mul z j (b s P))))",
         "(scale (* 1/4 (^ pi -1)) (sum (kernel (+ (* -2 (delta i s) (z j)) (* -2 (delta j s) (z i))))"
         " (mul z i (mul z j (b s P)))))",
         free=("i", "j", "s")),
    Rule("rule-inverse-z-z-b-b", "inverse Laplacian of z z b b P",
         "(inv 1 (mul z i (mul z j (b s (b t P)))))",
         "(scale (* 1/2 (^ pi -1)) (sum"
         " (kernel (+ (* -3 (delta j s) (delta i t)) (* -3 (delta j t) (delta i s))))"
         " (scale (* 1/2 (delta i t)) (mul z j (b s P))) (scale (* 1/2 (delta j t)) (mul z i (b s P)))"
         " (scale (* 1/2 (delta i s)) (mul z j (b t P))) (scale (* 1/2 (delta j s)) (mul z i (b t P)))"
         " (scale 1/4 (mul z i (mul z j (b s (b t P)))))))",
         free=("i", "j", "s", "t")),
    Rule("rule-inverse-z-z-zbar-zbar", "inverse Laplacian of z z zbar zbar P",
         "(inv 1 (kernel (* (z i) (z j) (zb s) (zb t))))",
         "(kernel (+ (* 1/4 (^ pi -2) (+"
         " (* -3/2 (^ pi -1) (delta i t) (delta j s)) (* -3/2 (^ pi -1) (delta j t) (delta i s))"
         f" (* 1/2 (delta i t) (z j) {_d('s')}) (* 1/2 (delta j t) (z i) {_d('s')})"
         f" (* 1/2 (delta i s) (z j) {_d('t')}) (* 1/2 (delta j s) (z i) {_d('t')})"
         f" (* 1/2 pi (z i) (z j) {_d('t')} {_d('s')})))"
         " (* 1/8 (^ pi -2) (+"
         f" (* (zbp t) (+ (* -2 (delta i s) (z j)) (* -2 (delta j s) (z i)) (* 2 pi (z i) (z j) {_d('s')})))"
         f" (* (zbp s) (+ (* -2 (delta i t) (z j)) (* -2 (delta j t) (z i)) (* 2 pi (z i) (z j) {_d('t')})))))))",
         free=("i", "j", "s", "t")),
    Rule("rule-b-z-z-zbar-normal-form", "normal form of b z z zbar P",
         "(b i (kernel (* (z j) (z k) (zb s))))",
         "(sum (scale (* 1/2 (^ pi -1)) (b i (b s (mul z j (mul z k P)))))"
         " (scale (* (^ pi -1) (delta j s)) (b i (mul z k P)))"
         " (scale (* (^ pi -1) (delta k s)) (b i (mul z j P)))"
         " (b i (kernel (* (z j) (z k) (zbp s)))))",
         free=("i", "j", "k", "s")),
    Rule("rule-inverse-b-z-z-zbar", "inverse Laplacian of b z z zbar P",
         "(inv 1 (b i (kernel (* (z j) (z k) (zb s)))))",
         "(kernel (+ (* 1/4 (^ pi -2) (+ (* -1 (delta j s) (delta i k))"
         f" (* pi (delta j s) (z k) {_d('i')}) (* -1 (delta k s) (delta i j))"
         f" (* pi (delta k s) (z j) {_d('i')}) (* -1 pi (delta i j) (z k) {_d('s')})"
         f" (* -1 pi (delta i k) (z j) {_d('s')}) (* (^ pi 2) (z j) (z k) {_d('i')} {_d('s')})))"
         " (* 1/4 (^ pi -1) (zbp s) (+ (* -2 (delta i j) (z k)) (* -2 (delta i k) (z j))"
         f" (* 2 pi (z j) (z k) {_d('i')})))))",
         free=("i", "j", "k", "s")),
    Rule("rule-inverse-b-z-z-zbar-tracked", "tracked part of the inverse Laplacian of b z z zbar P",
         "(inv 1 (b i (kernel (* (z j) (z k) (zb s)))))",
         "(kernel (* -1 (+ (* 1/4 (^ pi -2) (+ (* (delta j s) (delta i k)) (* (delta k s) (delta i j))))"
         " (* 1/4 (^ pi -1) (+ (* (delta j s) (z k) (zbp i)) (* (delta k s) (z j) (zbp i))"
         " (* (delta i j) (z k) (zbp s)) (* (delta i k) (z j) (zbp s)))))))",
         relation="approx", free=("i", "j", "k", "s")),
    Rule("rule-b-z-zbar-zbar-normal-form", "normal form of b z zbar zbar P",
         "(b i (kernel (* (z j) (zb s) (zb t))))",
         "(sum (scale (* 1/4 (^ pi -2)) (b i (b s (b t (mul z j P)))))"
         " (scale (* 1/2 (^ pi -2) (delta j s)) (b i (b t P)))"
         " (scale (* 1/2 (^ pi -2) (delta j t)) (b i (b s P)))"
         " (scale (* 1/2 (^ pi -1)) (b i (sum (b s (kernel (* (z j) (zbp t)))) (kernel (* 2 (delta j s) (zbp t))))))"
         " (scale (* 1/2 (^ pi -1)) (b i (sum (b t (kernel (* (z j) (zbp s)))) (kernel (* 2 (delta j t) (zbp s))))))"
         " (b i (kernel (* (z j) (zbp s) (zbp t)))))",
         free=("i", "j", "s", "t")),
    Rule("rule-inverse-b-z-zbar-zbar", "inverse Laplacian of b z zbar zbar P",
         "(inv 1 (b i (kernel (* (z j) (zb s) (zb t)))))",
         "(sum (scale (* 1/48 (^ pi -3)) (b i (b s (b t (mul z j P)))))"
         " (scale (* 1/16 (^ pi -3) (delta j s)) (b i (b t P)))"
         " (scale (* 1/16 (^ pi -3) (delta j t)) (b i (b s P)))"
         " (scale (* 1/16 (^ pi -2)) (b i (sum (b s (kernel (* (z j) (zbp t)))) (kernel (* 4 (delta j s) (zbp t))))))"
         " (scale (* 1/16 (^ pi -2)) (b i (sum (b t (kernel (* (z j) (zbp s)))) (kernel (* 4 (delta j t) (zbp s))))))"
         " (scale (* 1/4 (^ pi -1)) (b i (kernel (* (z j) (zbp s) (zbp t))))))",
         free=("i", "j", "s", "t")),
    Rule("rule-mixed-word-tracked", "tracked part of b (b z + 4 delta) zbar' P",
         "(scale (* 1/16 (^ pi -2)) (b i (sum (b s (kernel (* (z j) (zbp t)))) (kernel (* 4 (delta j s) (zbp t))))))",
         "(kernel (* 1/4 (^ pi -1) (zbp t) (- (* (delta j s) (zb i)) (* (delta i j) (zb s)))))",
         relation="approx", free=("i", "j", "s", "t")),
    Rule("rule-inverse-b-z-zbar-zbar-two-form", "two-form of the inverse Laplacian of b z zbar zbar P",
         "(inv 1 (b i (kernel (* (z j) (zb s) (zb t)))))",
         _tf(antiholo="(* 1/8 (^ pi -1) (+ (* (delta j s) (- (* (delta i r) (delta t q)) (* (delta i q) (delta t r))))"
             " (* (delta j t) (- (* (delta i r) (delta s q)) (* (delta i q) (delta s r))))))",
             free=("i", "j", "s", "t")),
         relation="two-form", free=("i", "j", "s", "t")),
    Rule("rule-inverse-b-cubic-zbar-untracked", "inverse Laplacian of b zbar zbar zbar P has no tracked part",
         "(inv 1 (b i (kernel (* (zb j) (zb s) (zb t)))))", "(kernel 0)",
         relation="approx", free=("i", "j", "s", "t")),
    Rule("rule-inverse-z-zbar", "inverse Laplacian of z zbar P",
         "(inv 1 (kernel (* (z s) (zb t))))",
         f"(kernel (* -1/4 (^ pi -2) (- (delta s t) (* pi (z s) {_d('t')}))))", free=("s", "t")),
    Rule("rule-projector-two-form", "the projector's two-form is pi times the identity table",
         "P", _tf(mixed="(* pi (delta r q))"), relation="two-form"),
    Rule("rule-first-order-kernel", "closed form of L^-1 P^perp O_1 P",
         _model("A"),
         "(kernel (* -1/3 I pi (+ (* (J #j~ #a~ #i~) (zb #j) (zbp #a) (zb #i))"
         " (* (J #a~ #b~ #i~) (zbp #a) (zbp #b) (zb #i)))))"),
    Rule("rule-first-order-adjoint-kernel", "closed form of the adjoint of L^-1 P^perp O_1 P",
         _adjoint_a,
         "(kernel (* 1/3 I pi (J #j #k #l) (+ (* (zp #j) (z #k) (zp #l)) (* (z #j) (z #k) (zp #l)))))"),
    Rule("rule-double-first-order-tracked", "tracked part of L^-1 P^perp O_1 L^-1 P^perp O_1 P",
         _model("I1"),
         "(kernel (* -2/9 (J #s #r #i) (J #k~ #q~ #j~) (+ (* (delta #i #k) (delta #j #s)) (* (delta #i #j) (delta #k #s)))"
         " (z #r) (zbp #q)))",
         relation="approx"),
)


def rule_by_name(name: str) -> Rule:
    for r in RULES:
        if r.name == name:
            return r
    raise KeyError(name)
