"""Kernel calculus: polynomials Q(Z, Z') times the Gaussian projector kernel.

A kernel is a :class:`~bergman_model.tensor.Poly` in the variables
``z, zb`` (point Z) and ``zp, zbp`` (point Z'); the factor P(Z, Z') is
implicit.  Operators act on the Z variables from the left; right actions
(``K o X``) act on Z'.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalar import PI, ExactScalar, as_scalar
from .tensor import Poly, delta, is_dummy, relabel_factor, term_labels, var

__all__ = [
    "P",
    "derivative",
    "mul_var",
    "mul_poly",
    "apply_b",
    "apply_bplus",
    "right_b",
    "right_bplus",
    "left_normal_form",
    "right_normal_form",
    "expand_left",
    "expand_right",
    "project_ker",
    "apply_inv_offdiag",
    "offdiag",
    "right_project",
    "right_inv_offdiag",
    "adjoint",
    "compose",
    "eval_origin",
    "TwoForm",
    "diagonal_two_form",
    "restrict",
    "word_length",
]

P = Poly.const(1)

_TWO_PI = PI * 2
_INV_PI = ExactScalar.const(1, pi=-1)
_INV_2PI = ExactScalar.const(Fraction(1, 2), pi=-1)


def _is_var(f, kind=None):
    return f[0] == "v" and (kind is None or f[1] == kind)


def derivative(K: Poly, kind: str, label: str) -> Poly:
    """Partial derivative with respect to the variable ``kind_label``."""
    def fn(term, c):
        out = []
        for i, f in enumerate(term):
            if _is_var(f, kind):
                rest = list(term[:i]) + list(term[i + 1:])
                out.append((rest + [delta(f[2], label)], c))
        return out
    return K.map_terms(fn)


def mul_var(K: Poly, kind: str, label: str) -> Poly:
    return K.map_terms(lambda t, c: [(list(t) + [var(kind, label)], c)])


def mul_poly(K: Poly, Q: Poly) -> Poly:
    return Q * K


def apply_b(K: Poly, label: str) -> Poly:
    """b_j (Q P) = (2 pi (zb_j - zbp_j) Q - 2 dQ/dz_j) P."""
    first = mul_var(K, "zb", label) - mul_var(K, "zbp", label)
    return first.scale(_TWO_PI) - derivative(K, "z", label).scale(2)


def apply_bplus(K: Poly, label: str) -> Poly:
    """b_j^+ (Q P) = 2 dQ/dzb_j P."""
    return derivative(K, "zb", label).scale(2)


def right_b(K: Poly, label: str) -> Poly:
    """(Q P) o b_j = 2 dQ/dzp_j P."""
    return derivative(K, "zp", label).scale(2)


def right_bplus(K: Poly, label: str) -> Poly:
    """(Q P) o b_j^+ = (2 pi (zp_j - z_j) Q - 2 dQ/dzbp_j) P."""
    first = mul_var(K, "zp", label) - mul_var(K, "z", label)
    return first.scale(_TWO_PI) - derivative(K, "zbp", label).scale(2)


# -- Fock normal form --------------------------------------------------------

_SIDE = {
    # peeled variable, word tag, derivative kind, replacement variable
    "left": ("zb", "B", "z", "zbp"),
    "right": ("zp", "BR", "zbp", "z"),
}


def _normal_form(K: Poly, side: str, last: bool = False) -> Poly:
    peel, tag, dkind, repl = _SIDE[side]
    done = Poly()
    pending = K
    while pending:
        nxt = []
        heads = {}
        for term, c in pending.items():
            hits = [i for i, f in enumerate(term) if _is_var(f, peel)]
            idx = (hits[-1] if last else hits[0]) if hits else None
            if idx is None:
                heads[term] = c
                continue
            lab = term[idx][2]
            rest = list(term[:idx]) + list(term[idx + 1:])
            nxt.append((rest + [(tag, lab)], c * _INV_2PI))
            nxt.append((rest + [var(repl, lab)], c))
            g = [f for f in rest if f[0] != tag]
            w = [f for f in rest if f[0] == tag]
            for i, f in enumerate(g):
                if _is_var(f, dkind):
                    gg = g[:i] + g[i + 1:]
                    nxt.append((gg + w + [delta(f[2], lab)], c * _INV_PI))
        done = done + Poly(heads)
        pending = Poly.from_terms(nxt)
    return done


def left_normal_form(K: Poly, last: bool = False) -> Poly:
    """Rewrite K as a sum of b-words (``B`` factors) applied to zb-free heads.

    ``last`` peels the last zb of each term first instead of the first one.
    """
    return _normal_form(K, "left", last)


def right_normal_form(K: Poly, last: bool = False) -> Poly:
    """Rewrite K as zp-free heads followed by right b^+ words (``BR`` factors)."""
    return _normal_form(K, "right", last)


def word_length(term) -> int:
    return sum(1 for f in term if f[0] in ("B", "BR"))


def expand_left(nf: Poly) -> Poly:
    return _expand(nf, "B", apply_b)


def expand_right(nf: Poly) -> Poly:
    return _expand(nf, "BR", right_bplus)


def _expand(nf: Poly, tag: str, act) -> Poly:
    out = Poly()
    for term, c in nf.items():
        # freeze dummies so word labels stay linked to the head after canonicalization
        frozen = {l: "@" + l[1:] for l in term_labels(term) if is_dummy(l)}
        term = [relabel_factor(f, frozen) for f in term]
        labs = [f[1] for f in term if f[0] == tag]
        k = Poly.from_terms([([f for f in term if f[0] != tag], c)])
        for lab in labs:
            k = act(k, lab)
        for lab in frozen.values():
            k = k.sum_over(lab)
        out = out + k
    return out


def _scale_by_length(nf: Poly, k: int) -> Poly:
    def fn(term, c):
        ell = word_length(term)
        if ell == 0:
            return []
        return [(term, c * (PI * (4 * ell)) ** (-k))]
    return nf.map_terms(fn)


def project_ker(K: Poly) -> Poly:
    """P o K: keep the component with empty b-word."""
    return left_normal_form(K).filter(lambda t: word_length(t) == 0)


def offdiag(K: Poly) -> Poly:
    """P^perp o K."""
    return K - project_ker(K)


def apply_inv_offdiag(K: Poly, k: int = 1) -> Poly:
    """L^{-k} P^perp o K via the spectral decomposition by word length."""
    if k < 1:
        raise ValueError("power must be positive")
    return expand_left(_scale_by_length(left_normal_form(K), k))


def right_project(K: Poly) -> Poly:
    """K o P."""
    return right_normal_form(K).filter(lambda t: word_length(t) == 0)


def right_inv_offdiag(K: Poly, k: int = 1) -> Poly:
    """K o L^{-k} P^perp."""
    if k < 1:
        raise ValueError("power must be positive")
    return expand_right(_scale_by_length(right_normal_form(K), k))


# -- adjoint and composition -------------------------------------------------

_ADJ_KIND = {"z": "zbp", "zb": "zp", "zp": "zb", "zbp": "z"}


def adjoint(K: Poly) -> Poly:
    """Kernel of the adjoint operator: conj(Q(Z', Z)) P(Z, Z')."""
    def fn(term, c):
        out = []
        for f in term:
            if f[0] == "T":
                out.append(("T", f[1], tuple((l, not b) for l, b in f[2])))
            elif f[0] == "v":
                out.append(("v", _ADJ_KIND[f[1]], f[2]))
            elif f[0] == "d":
                out.append(f)
            else:
                raise ValueError("adjoint expects a plain kernel")
        return [(out, c.conj())]
    return K.map_terms(fn)


_PRIME_TO_PLAIN = {"zp": "z", "zbp": "zb"}


def compose(K1: Poly, K2: Poly) -> Poly:
    """Kernel of K1 o K2, computed through the Fock normal form of K1."""
    nf = left_normal_form(K1)
    out_items = []
    cache: dict = {}
    for term, c in nf.items():
        # freeze this term's dummies so they survive the separate inner product
        frozen = {l: "@" + l[1:] for l in term_labels(term) if is_dummy(l)}
        thaw = {v: k for k, v in frozen.items()}
        term = tuple(relabel_factor(f, frozen) for f in term)
        word = [f for f in term if f[0] == "B"]
        h2 = tuple(sorted(f for f in term if _is_var(f) and f[1] in _PRIME_TO_PLAIN))
        rest = [f for f in term if f not in word and f not in h2]
        if h2 not in cache:
            h2_plain = [var(_PRIME_TO_PLAIN[f[1]], f[2]) for f in h2]
            cache[h2] = project_ker(Poly.term(h2_plain) * K2)
        for t2, c2 in cache[h2].items():
            t2 = _shift(t2)
            factors = list(rest) + list(word) + list(t2)
            out_items.append(([relabel_factor(f, thaw) for f in factors], c * c2))
    return expand_left(Poly.from_terms(out_items))


def _shift(term):
    return [relabel_factor(f, {l: "#i" + l[1:] for l in term_labels(term) if is_dummy(l)}) for f in term]


def eval_origin(K: Poly) -> Poly:
    """Constant term of Q (P(0, 0) = 1)."""
    return K.filter(lambda t: not any(f[0] in ("v", "B", "BR") for f in t))


# -- diagonal two-form -------------------------------------------------------

@dataclass(frozen=True)
class TwoForm:
    """Coefficient tables with free indices ``r, q``.

    ``mixed[r, q]`` multiplies dz_r ^ dzbar_q; ``holo`` and ``antiholo`` are the
    antisymmetric tables of dz_r ^ dz_q and dzbar_r ^ dzbar_q (full double sum).
    """

    mixed: Poly
    holo: Poly
    antiholo: Poly

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.mixed - other.mixed, self.holo - other.holo, self.antiholo - other.antiholo)

    def __add__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.mixed + other.mixed, self.holo + other.holo, self.antiholo + other.antiholo)

    def scale(self, c) -> "TwoForm":
        return TwoForm(self.mixed.scale(c), self.holo.scale(c), self.antiholo.scale(c))

    def is_zero(self) -> bool:
        return self.mixed.is_zero() and self.holo.is_zero() and self.antiholo.is_zero()


R_LABEL, Q_LABEL = "r", "q"


def diagonal_two_form(K: Poly) -> TwoForm:
    """d_x d_y of (Q P) at the origin, split into complex-frame blocks."""
    if {R_LABEL, Q_LABEL} & K.free_labels():
        raise ValueError("kernel uses the reserved free labels r, q")
    half = as_scalar(1) / 2
    mixed, holo, anti = [], [], []
    for term, c in K.items():
        vs = [f for f in term if f[0] == "v"]
        if any(f[0] in ("B", "BR") for f in term):
            raise ValueError("diagonal_two_form expects a plain kernel")
        rest = [f for f in term if f[0] != "v"]
        if not vs:
            mixed.append((rest + [delta(R_LABEL, Q_LABEL)], c * PI))
            continue
        if len(vs) != 2:
            continue
        kinds = {f[1]: f[2] for f in vs}
        if len(kinds) != 2:
            continue
        if set(kinds) == {"z", "zbp"}:
            mixed.append((rest + [delta(kinds["z"], R_LABEL), delta(kinds["zbp"], Q_LABEL)], c))
        elif set(kinds) == {"zb", "zp"}:
            mixed.append((rest + [delta(kinds["zb"], Q_LABEL), delta(kinds["zp"], R_LABEL)], -c))
        elif set(kinds) == {"z", "zp"}:
            a, b = kinds["z"], kinds["zp"]
            holo.append((rest + [delta(a, R_LABEL), delta(b, Q_LABEL)], c * half))
            holo.append((rest + [delta(a, Q_LABEL), delta(b, R_LABEL)], -c * half))
        elif set(kinds) == {"zb", "zbp"}:
            a, b = kinds["zb"], kinds["zbp"]
            anti.append((rest + [delta(a, R_LABEL), delta(b, Q_LABEL)], c * half))
            anti.append((rest + [delta(a, Q_LABEL), delta(b, R_LABEL)], -c * half))
    return TwoForm(Poly.from_terms(mixed), Poly.from_terms(holo), Poly.from_terms(anti))


# -- bookkeeping relations ---------------------------------------------------

_PRIMED = ("zp", "zbp")


def restrict(K: Poly, relation: str) -> Poly:
    """Part of K tracked by a relation.

    ``'sim'`` keeps monomials of Z'-degree <= 1; ``'approx'`` keeps monomials
    of Z-degree <= 1 and Z'-degree <= 1.  Two kernels are related iff their
    restrictions agree.
    """
    def degs(t):
        dp = sum(1 for f in t if f[0] == "v" and f[1] in _PRIMED)
        du = sum(1 for f in t if f[0] == "v" and f[1] not in _PRIMED)
        return du, dp

    if relation == "sim":
        return K.filter(lambda t: degs(t)[1] <= 1)
    if relation == "approx":
        return K.filter(lambda t: max(degs(t)) <= 1)
    raise ValueError(f"unknown relation {relation!r}")
