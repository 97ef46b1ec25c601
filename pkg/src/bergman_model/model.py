"""The first- and second-order correction operators and the kernels built from them.

Every kernel is defined by an :mod:`~bergman_model.expr` tree (its *defining
expression*), evaluated symbolically here and numerically by the oracle.
Tensor conventions, all in the complex frame d/dz_j, d/dzbar_j:

* ``J[a,b,c] = <(nabla_a J) b, c>`` with the rescaled structure ``-2 pi i J`` in
  place of ``J``; nonzero only when all slots are unbarred or all barred,
  antisymmetric in the last two slots;
* ``R[a,b,c,d] = <R(a, b) c, d>`` for the Levi-Civita curvature;
* ``DDJ[a~,b~,c~,d~] = <(nabla nabla J)_(a, b) c, d>``, only all-barred;
* ``Phi`` is the scalar potential term.

The pairing of two nabla-J vectors contracts as
``<(nabla_a J) b, (nabla_c~ J) d~> = 2 J[a,b,#r] J[c~,d~,#r~]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import expr as ex
from . import kernel as kc
from .scalar import I, ONE, PI, ExactScalar
from .tensor import Poly, delta, tensor, var

__all__ = [
    "T",
    "V",
    "poly",
    "o1",
    "o2p_pieces",
    "o2p",
    "catalog",
    "kernel_of",
    "defining_expr",
    "b1_poly",
    "grad_j_sq",
    "expected_two_forms",
    "KERNEL_NAMES",
]


# -- small constructors -------------------------------------------------------

def T(family: str, slots: str = ""):
    """Tensor factor from slot text, e.g. ``T("J", "#a #b i~")``."""
    parsed = []
    for s in slots.split():
        parsed.append((s[:-1], True) if s.endswith("~") else (s, False))
    return tensor(family, *parsed)


def V(kind: str, label: str):
    return var(kind, label)


def poly(*terms) -> Poly:
    """Poly from ``(coeff, factor, factor, ...)`` tuples; factors share dummies within a term."""
    items = []
    for t in terms:
        c, *factors = t
        items.append((factors, _sc(c)))
    return Poly.from_terms(items)


def _sc(c) -> ExactScalar:
    if isinstance(c, ExactScalar):
        return c
    return ExactScalar.const(Fraction(c))


def _q(a, b=1):
    return ExactScalar.const(Fraction(a, b))


_KIND = {False: "z", True: "zb"}


def _bar(label: str, barred: bool) -> str:
    return label + ("~" if barred else "")


def _curly_r_slots(family: str, pattern: str, positions: tuple[int, ...]):
    """Expand the radial field R = z + zbar in the listed slots of a tensor pattern.

    ``pattern`` uses ``@k`` placeholders for the radial slots; returns a list of
    factor lists, one per choice of bars.
    """
    out = []
    for bars in _bar_choices(len(positions)):
        text = pattern
        facs = []
        for k, b in zip(positions, bars):
            lab = f"#x{k}"
            text = text.replace(f"@{k}", _bar(lab, b))
            facs.append(V(_KIND[b], lab))
        out.append([T(family, text)] + facs)
    return out


def _bar_choices(k: int):
    if k == 0:
        return [()]
    return [c + (b,) for c in _bar_choices(k - 1) for b in (False, True)]


# -- the first-order operator --------------------------------------------------

_O1_COEFF = I * PI * _q(4, 3)


def o1(x, label: str = "i"):
    """O_1 X = (4 pi i / 3) [J[a,b,i] z_a z_b b_i^+ X - b_i (J[a~,b~,i~] zb_a zb_b X)]."""
    up = poly((1, T("J", f"#a #b {label}"), V("z", "#a"), V("z", "#b")))
    down = poly((-1, T("J", f"#a~ #b~ {label}~"), V("zb", "#a"), V("zb", "#b")))
    body = ex.Sum((
        ex.Scale(up, ex.ApplyBplus(label, x)),
        ex.ApplyB(label, ex.Scale(down, x)),
    ))
    return ex.Scale(Poly.const(_O1_COEFF), ex.SumOver((label,), body))


# -- the second-order operator applied to P --------------------------------------

def _kernel(*terms):
    return ex.LeafKernel(poly(*terms))


def _r_radial_kernel(pattern: str) -> Poly:
    """R with its @1, @3 slots contracted against the radial field, times P."""
    return Poly.from_terms([(f, ONE) for f in _curly_r_slots("R", pattern, (1, 3))])


def _laplacian(x, label: str):
    return ex.SumOver((label,), ex.ApplyB(label, ex.ApplyBplus(label, x)))


def _x_cubic(i: str) -> Poly:
    """The cubic coefficient X_i multiplying b_i in the derivative-of-curvature term."""
    pi = PI
    jj = [V("z", "#a"), V("z", "#b"), V("zb", "#c")]
    return Poly.from_terms([
        (jj + [T("J", "#a #b #r"), T("J", f"#c~ {i}~ #r~")], -pi * 3),
        (jj + [T("J", "#a #b #r"), T("J", f"{i}~ #c~ #r~")], pi),
        ([T("R", f"#a #b~ #c~ {i}~"), V("z", "#a"), V("zb", "#b"), V("zb", "#c")], -pi * 2),
        ([T("DDJ", f"#a~ #b~ #c~ {i}~"), V("zb", "#a"), V("zb", "#b"), V("zb", "#c")], -pi * I),
        ([T("R", f"#a #b~ #c {i}~"), V("z", "#a"), V("zb", "#b"), V("z", "#c")], -pi * _q(2, 3)),
        ([T("R", f"#a #b~ #c~ {i}~"), V("z", "#a"), V("zb", "#b"), V("zb", "#c")], -pi * _q(2, 3)),
    ])


def _jj_z_zbar() -> Poly:
    # <(nabla_z J) d/dz_i, (nabla_zbar J) d/dzbar_i> = 2 J[a,i,r] J[b~,i~,r~] z_a zb_b
    return poly((2, T("J", "#a #i #r"), T("J", "#b~ #i~ #r~"), V("z", "#a"), V("zb", "#b")))


def _jj_quartic() -> Poly:
    # |(nabla_R J) R|^2 = 4 J[a,b,r] J[c~,d~,r~] z_a z_b zb_c zb_d
    return poly((4, T("J", "#a #b #r"), T("J", "#c~ #d~ #r~"),
                 V("z", "#a"), V("z", "#b"), V("zb", "#c"), V("zb", "#d")))


def o2p_pieces() -> dict[str, ex.OperatorExpr]:
    """The pieces of O_2 P, keyed by the name of the I_2 sub-term they feed."""
    P = ex.LeafP()
    rr = _r_radial_kernel("@1 i~ @3 j~")
    p1 = ex.Scale(Poly.const(_q(1, 3)), ex.SumOver(("i", "j"), ex.ApplyB("i", ex.ApplyB("j", ex.LeafKernel(rr)))))
    p2 = ex.Scale(Poly.const(_q(1, 2)), ex.SumOver(("i",), ex.ApplyB("i", ex.LeafKernel(_x_cubic("i")))))
    r3 = Poly.from_terms(
        [(f, ONE) for f in _curly_r_slots("R", "#k #k~ @1 j~", (1,))]
        + [(f, -ONE) for f in _curly_r_slots("R", "@1 #k #k~ j~", (1,))]
    )
    p3 = ex.Scale(Poly.const(_q(4, 3)), ex.SumOver(("j",), ex.ApplyB("j", ex.LeafKernel(r3))))
    p4 = ex.Scale(Poly.const(-PI * 4), ex.LeafKernel(_jj_z_zbar().scale(_q(1, 2))))
    r5 = _r_radial_kernel("@1 #j @3 #j~")
    p5 = ex.Scale(Poly.const(_q(-1, 3)), _laplacian(ex.LeafKernel(r5), "k"))
    p6 = ex.Scale(Poly.const(PI * PI * _q(4, 9)), ex.LeafKernel(_jj_quartic()))
    const = poly((4, T("R", "#i #j~ #i~ #j~")), (1, T("Phi")))
    return {
        "I21": p1, "I22": p2, "I23": p3, "I24": p4, "I25": p5, "I26": p6,
        "const": ex.LeafKernel(const),
    }


def o2p():
    pieces = o2p_pieces()
    return ex.Sum(tuple(pieces[k] for k in sorted(pieces)))


# -- catalog of defining expressions ---------------------------------------------

def _neg(x):
    return ex.Scale(Poly.const(-1), x)


def _inv1(x):
    return ex.Inv(1, ex.Offdiag(x))


def _a_expr():
    return _inv1(o1(ex.LeafP(), "i1"))


def _a_star_expr():
    # P O_1 L^{-1} P^perp as an open operator
    return ex.Compose(ex.LeafP(), o1(_inv1(ex.LeafI()), "i1"))


def _i27_expr():
    word = ex.ApplyB("i", ex.ApplyB("j", ex.LeafKernel(
        poly((1, T("R", "#s~ i~ #t~ j~"), V("zb", "#s"), V("zb", "#t"))))))
    return ex.SumOver(("i", "j"), _inv1(word))


def defining_expr(name: str):
    """Operator expression that defines a named kernel."""
    P = ex.LeafP()
    pieces = o2p_pieces()
    if name == "A":
        return _a_expr()
    if name == "F1":
        return _neg(ex.Sum((_a_expr(), _a_star_expr_closed())))
    if name == "I1":
        return _inv1(o1(_inv1(o1(P, "i1")), "i2"))
    if name == "I2":
        return _neg(_inv1(o2p()))
    if name == "I3":
        return ex.Compose(P, o1(_inv1(o1(_inv1(ex.LeafI()), "i1")), "i2"))
    if name == "I4":
        return _neg(ex.Compose(ex.Adjoint(o2p()), _inv1(ex.LeafI())))
    if name == "I5":
        return ex.Compose(_a_expr(), _a_star_expr())
    if name == "I6":
        return _neg(ex.Project(o1(ex.Inv(2, ex.Offdiag(o1(P, "i1"))), "i2")))
    if name in ("I21", "I22", "I24", "I26"):
        return ex.Inv(1, ex.Offdiag(pieces[name]))
    if name == "I23":
        return ex.Inv(1, pieces["I23"])
    if name == "I25":
        return ex.Offdiag(ex.Inv(1, pieces["I25"]))
    if name == "I27":
        return _i27_expr()
    if name == "F2":
        return ex.Sum(tuple(defining_expr(f"I{k}") for k in range(1, 7)))
    raise KeyError(name)


def _a_star_expr_closed():
    return ex.Compose(ex.LeafP(), o1(_inv1(ex.LeafI()), "i1"))


KERNEL_NAMES = (
    "F1", "F2", "I1", "I2", "I3", "I4", "I5", "I6",
    "I21", "I22", "I23", "I24", "I25", "I26", "I27",
)


@lru_cache(maxsize=None)
def kernel_of(name: str) -> Poly:
    """Engine kernel of a named term, assembled through the cheapest exact route."""
    if name == "A":
        return ex.evaluate(_a_expr())
    if name == "F1":
        a = kernel_of("A")
        return -(a + kc.adjoint(a))
    if name == "I1":
        return ex.evaluate(_inv1(o1(ex.LeafKernel(kernel_of("A")), "i2")))
    if name == "I3":
        return kc.adjoint(kernel_of("I1"))
    if name == "O2P":
        return ex.evaluate(o2p())
    if name == "I2":
        return -kc.apply_inv_offdiag(kernel_of("O2P"), 1)
    if name == "I4":
        return kc.adjoint(kernel_of("I2"))
    if name == "I5":
        a = kernel_of("A")
        return kc.compose(a, kc.adjoint(a))
    if name == "I6":
        a = kernel_of("A")
        return -kc.compose(kc.adjoint(a), a)
    if name == "F2":
        out = Poly()
        for k in range(1, 7):
            out = out + kernel_of(f"I{k}")
        return out
    return ex.evaluate(defining_expr(name))


def catalog() -> dict[str, Poly]:
    return {name: kernel_of(name) for name in KERNEL_NAMES}


def direct_route(name: str) -> Poly:
    """Kernels of I_3 .. I_6 evaluated straight from their defining expressions."""
    return ex.evaluate(defining_expr(name))


# -- reference values -------------------------------------------------------------

def b1_poly() -> Poly:
    """b_1 = (1/pi) R[j, i~, i, j~] (summed)."""
    return poly((ExactScalar.const(1, pi=-1), T("R", "#j #i~ #i #j~")))


def grad_j_sq() -> Poly:
    """|nabla J|^2 = 16 J[i,j,r] J[i~,j~,r~]."""
    return poly((16, T("J", "#i #j #r"), T("J", "#i~ #j~ #r~")))


_RQ = delta("r", "q")


def _with_delta(p: Poly) -> Poly:
    return p * Poly.term([_RQ])


def _antisym(p: Poly) -> Poly:
    """(A_rq - A_qr) / 2 for a table with free labels r, q."""
    return (p - p.relabel({"r": "q", "q": "r"})).scale(_q(1, 2))


def _jj(a: str, b: str, c: str, d: str, e: str, f: str) -> Poly:
    return poly((1, T("J", f"{a} {b} {c}"), T("J", f"{d} {e} {f}")))


def expected_two_forms() -> dict[str, kc.TwoForm]:
    """Diagonal two-forms as displayed in the derivation, one per named kernel.

    ``omega`` contributes ``(i/2) delta_rq`` to the mixed block, and each
    displayed dzbar_r ^ dzbar_q coefficient is antisymmetrized into the table.
    """
    zero = Poly()
    j_sym = _jj("#j", "#i", "r", "#i~", "#j~", "q~") + _jj("#j", "#i", "r", "#j~", "#i~", "q~")
    i1 = j_sym.scale(_q(-2, 9))
    i5 = j_sym.scale(_q(-1, 9))
    ric = poly((1, T("R", "#j #i~ #i #j~")))
    i2 = _with_delta(ric).scale(_q(1, 2)) + (
        _jj("#j", "#i", "r", "#j~", "#i~", "q~") + _jj("#j", "#i", "r", "#i~", "#j~", "q~")
    ).scale(_q(1, 3))
    g2 = grad_j_sq()

    i21_mixed = _with_delta(poly((2, T("R", "#j #i~ #i #j~")), (-1, T("R", "#j #i #i~ #j~")))).scale(_q(1, 6)) + \
        poly((2, T("R", "r #j~ #j q~")), (1, T("R", "#j r #j~ q~"))).scale(_q(1, 3))
    i21_anti = _antisym(poly((1, T("R", "#j r~ #j~ q~")), (1, T("R", "#j #j~ r~ q~"))).scale(_q(1, 3)))

    i23_mixed = _with_delta(poly((1, T("R", "#j #i~ #i #j~")), (-2, T("R", "#j #i #i~ #j~")))).scale(_q(-2, 3)) + \
        poly((1, T("R", "r #i~ #i q~")), (2, T("R", "#i r #i~ q~"))).scale(_q(-2, 3))
    i23_anti = _antisym(poly((1, T("R", "#i #i~ r~ q~")), (1, T("R", "#i r~ #i~ q~"))).scale(_q(-2, 3)))

    i25_mixed = _with_delta(g2.scale(_q(1, 96)) - poly((1, T("R", "#i #j~ #j #i~"))).scale(_q(1, 3))) + \
        poly((1, T("R", "#i r #i~ q~")), (-1, T("R", "r #i~ #i q~"))).scale(_q(1, 3))

    i26_mixed = _with_delta(g2.scale(_q(-1, 16))) + (
        _jj("#i", "#j", "r", "#i~", "#j~", "q~").scale(5) - _jj("#i", "#j", "r", "#j~", "#i~", "q~").scale(4)
    ).scale(_q(-2, 3))

    i22_mixed = _with_delta(g2.scale(_q(5, 96)) + ric.scale(_q(1, 3))).scale(_q(1, 2)) + (
        _jj("#j", "#i", "r", "#j~", "#i~", "q~").scale(5) - _jj("#j", "#i", "r", "#i~", "#j~", "q~").scale(4)
    ).scale(_q(1, 4)) + poly((1, T("R", "#j r #j~ q~")), (2, T("R", "r #j~ #j q~"))).scale(_q(1, 6))
    i22_anti = _antisym(poly((1, T("R", "#j #j~ r~ q~")), (1, T("R", "#j r~ #j~ q~"))).scale(_q(1, 3)))

    i24_mixed = _with_delta(g2.scale(_q(1, 16))) + (
        _jj("#i", "#j", "r", "#i~", "#j~", "q~") - _jj("#i", "#j", "r", "#j~", "#i~", "q~")
    ).scale(2)

    before = _with_delta(ric).scale(_q(1, 2)) + poly((1, T("R", "#j r #j~ q~"))).scale(_q(1, 2)) + (
        _jj("#j", "#i", "r", "#j~", "#i~", "q~") + _jj("#j", "#i", "r", "#i~", "#j~", "q~").scale(4)
    ).scale(_q(1, 12))

    f2 = _with_delta(ric)
    return {
        "I2-unsubstituted": kc.TwoForm(before, zero, zero),
        "I1": kc.TwoForm(i1, zero, zero),
        "I3": kc.TwoForm(i1, zero, zero),
        "I5": kc.TwoForm(i5, zero, zero),
        "I6": kc.TwoForm(i5, zero, zero),
        "I2": kc.TwoForm(i2, zero, zero),
        "I4": kc.TwoForm(i2, zero, zero),
        "I21": kc.TwoForm(i21_mixed, zero, i21_anti),
        "I22": kc.TwoForm(i22_mixed, zero, i22_anti),
        "I23": kc.TwoForm(i23_mixed, zero, i23_anti),
        "I24": kc.TwoForm(i24_mixed, zero, zero),
        "I25": kc.TwoForm(i25_mixed, zero, zero),
        "I26": kc.TwoForm(i26_mixed, zero, zero),
        "F1": kc.TwoForm(zero, zero, zero),
        "F2": kc.TwoForm(f2, zero, zero),
    }
