"""Named verification checks.

Each check is a pure function of ``(n, seed, D, tol)`` returning a
:class:`Verdict`.  Numeric checks draw ``NUM_SEEDS`` admissible samples
starting at ``seed``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import expr as ex
from . import kernel as kc
from . import model
from . import oracle as orc
from .rules import RULES, evaluate_rule
from .sampler import (
    contracted_constraint_residual,
    cyclic_residual,
    resample_family,
    sample_admissible,
)
from .scalar import ExactScalar
from .tensor import Poly, delta, expand_concrete, numeric_eval, var

__all__ = ["Verdict", "Check", "CHECKS", "run_check", "NUM_SEEDS", "random_kernel"]

NUM_SEEDS = 5
PROPERTY_CASES = 100
RQ = (kc.R_LABEL, kc.Q_LABEL)


@dataclass(frozen=True)
class Verdict:
    check: str
    n: int
    seed: int
    D: int | None
    tol: float
    residual: float
    expected: str
    passed: bool
    paper_ref: str
    detail: str = ""

    def record(self) -> dict:
        out = {
            "check": self.check,
            "params": {"n": self.n, "seed": self.seed, "D": self.D, "tol": self.tol},
            "residual": float(self.residual),
            "expected": self.expected,
            "status": "pass" if self.passed else "fail",
            "paper_ref": self.paper_ref,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class Outcome:
    residual: float
    passed: bool
    detail: str = ""
    D: int | None = None


@dataclass(frozen=True)
class Check:
    name: str
    paper_ref: str
    expected: str
    tol: float
    fn: Callable[[int, int, int | None, float], Outcome] = field(repr=False)


CHECKS: dict[str, Check] = {}


def _register(name: str, paper_ref: str, expected: str, tol: float = 1e-9):
    def deco(fn):
        if name in CHECKS:
            raise ValueError(f"duplicate check name {name!r}")
        CHECKS[name] = Check(name, paper_ref, expected, tol, fn)
        return fn
    return deco


def run_check(name: str, n: int, seed: int, D: int | None = None, tol: float | None = None) -> Verdict:
    chk = CHECKS[name]
    t = chk.tol if tol is None else tol
    out = chk.fn(n, seed, D, t)
    return Verdict(name, n, seed, out.D, t, out.residual, chk.expected.format(tol=f"{t:g}"),
                   out.passed, chk.paper_ref, out.detail)


# -- numeric helpers ------------------------------------------------------------

def _seeds(seed: int):
    return [seed + k for k in range(NUM_SEEDS)]


def _samples(n: int, seed: int):
    return [sample_admissible(n, s) for s in _seeds(seed)]


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    diff = float(np.max(np.abs(a - b), initial=0.0))
    scale = max(float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return diff / scale if scale > 1.0 else diff


def _table(p: Poly, assign) -> np.ndarray:
    return numeric_eval(p, assign, RQ)


def _coeff_max(p: Poly, assign) -> float:
    coeffs = expand_concrete(p, assign)
    return max((abs(c) for c in coeffs.values()), default=0.0)


def _degree(term) -> int:
    return sum(1 for f in term if f[0] == "v")


def _two_form_gap(tf: kc.TwoForm, want: kc.TwoForm, assign) -> float:
    return max(_rel(_table(getattr(tf, b), assign), _table(getattr(want, b), assign))
               for b in ("mixed", "holo", "antiholo"))


# -- spectral facts ---------------------------------------------------------------

_SPECTRAL_D = {1: 10, 2: 8, 3: 6, 4: 4}


@_register("laplacian-spectrum", "spectrum of the harmonic oscillator Laplacian is 4 pi times the b-degree",
           "every eigenvalue within {tol} of 4 pi k", tol=1e-8)
def _laplacian_spectrum(n, seed, D, tol):
    D = D or _SPECTRAL_D[n]
    basis = orc.fock_basis(n, D)
    ev = np.sort(orc.laplacian_spectrum(basis))
    want = np.sort(4 * math.pi * basis.alpha_degree.astype(float))
    res = float(np.max(np.abs(ev - want)))
    return Outcome(res, res <= tol, D=D)


@_register("basis-orthonormality", "normalized states b^alpha z^beta P form an orthonormal basis",
           "Gram matrix within {tol} of the identity", tol=1e-10)
def _orthonormal(n, seed, D, tol):
    D = D or _SPECTRAL_D[n]
    basis = orc.fock_basis(n, D)
    g = orc.gram_matrix(basis, D)
    res = float(np.max(np.abs(g - np.eye(g.shape[0]))))
    return Outcome(res, res <= tol, D=D)


@_register("basis-norm-quadrature", "state norms from the ladder algebra agree with direct integration",
           "relative gap within {tol}", tol=1e-10)
def _quadrature(n, seed, D, tol):
    D = min(D or 4, 4)
    res = 0.0
    for a in range(D + 1):
        for b in range(D + 1 - a):
            want = orc.state_norm_sq((a,), (b,))
            res = max(res, abs(orc.quadrature_norm_sq(a, b) - want) / want)
    return Outcome(res, res <= tol, D=D)


@_register("ladder-commutator", "commutation relation [b_j, b_k^+] = -4 pi delta_jk",
           "interior block within {tol}", tol=1e-10)
def _commutator(n, seed, D, tol):
    D = D or _SPECTRAL_D[n]
    basis = orc.fock_basis(n, D)
    cols = np.flatnonzero(basis.degree <= D - 1)
    res = 0.0
    for j in range(n):
        for k in range(n):
            c = (basis.b[j].mat @ basis.bplus[k].mat - basis.bplus[k].mat @ basis.b[j].mat).toarray()
            if j == k:
                c = c + 4 * math.pi * np.eye(basis.dim)
            c2 = (basis.b[j].mat @ basis.b[k].mat - basis.b[k].mat @ basis.b[j].mat).toarray()
            res = max(res, float(np.max(np.abs(c[:, cols]))), float(np.max(np.abs(c2))))
    return Outcome(res, res <= tol, D=D)


@_register("projector-matrix", "the projector is an orthogonal projection onto alpha = 0 states",
           "idempotent, self-adjoint and equal to P composed with P within {tol}", tol=1e-12)
def _projector_matrix(n, seed, D, tol):
    D = D or _SPECTRAL_D[n]
    basis = orc.fock_basis(n, D)
    assign = sample_admissible(n, seed)
    p = basis.P.mat
    res = float(abs(p @ p - p).max()) + float(abs(p - p.conj().T).max())
    pp = orc.matrix_of(ex.Compose(ex.LeafP(), ex.LeafP()), basis, assign)
    res = max(res, orc.compare(pp, basis.P, basis))
    return Outcome(res, res <= tol, D=D)


# -- reduction rules -------------------------------------------------------------------

def _rule_check(rule):
    def fn(n, seed, D, tol):
        same, gap = evaluate_rule(rule, n, sample_admissible(n, seed))
        return Outcome(gap, same, "" if same else f"symbolic mismatch, numeric gap {gap:.3e}")
    return fn


for _r in RULES:
    _register(_r.name, _r.ref, "symbolic equality", tol=0.0)(_rule_check(_r))


# -- first-order term -------------------------------------------------------------------

@_register("f1-first-order", "first derivatives of the first-order coefficient vanish at the origin",
           "empty symbolic residual and numeric residual within {tol}", tol=1e-10)
def _f1_first_order(n, seed, D, tol):
    f1 = model.kernel_of("F1")
    lin = f1.filter(lambda t: _degree(t) == 1)
    res = max(_coeff_max(lin, a) for a in _samples(n, seed))
    ok = lin.is_zero() and res <= tol
    return Outcome(res, ok, "" if lin.is_zero() else f"symbolic residual has {len(lin)} terms")


@_register("f1-origin-zero", "the first-order coefficient vanishes on the diagonal",
           "exactly zero", tol=0.0)
def _f1_origin(n, seed, D, tol):
    c = kc.eval_origin(model.kernel_of("F1"))
    res = max(abs(complex(numeric_eval(c, a))) for a in _samples(n, seed)) if c else 0.0
    return Outcome(res, c.is_zero(), "" if c.is_zero() else "nonzero constant term")


@_register("f1-two-form-vanishes", "the first-order coefficient has no mixed second derivative at the origin",
           "exactly zero", tol=0.0)
def _f1_two_form(n, seed, D, tol):
    tf = kc.diagonal_two_form(model.kernel_of("F1"))
    return Outcome(0.0 if tf.is_zero() else 1.0, tf.is_zero())


@_register("f2-first-order", "first derivatives of the second-order coefficient vanish at the origin",
           "exactly zero", tol=0.0)
def _f2_first(n, seed, D, tol):
    lin = model.kernel_of("F2").filter(lambda t: _degree(t) == 1)
    return Outcome(0.0 if lin.is_zero() else 1.0, lin.is_zero())


# -- second-order term ------------------------------------------------------------------

_TERM_TABLE = (
    ("I1", "double first-order term"),
    ("I3", "adjoint of the double first-order term"),
    ("I5", "first-order term composed with its adjoint"),
    ("I6", "first-order adjoint composed with the squared inverse"),
    ("I2", "second-order operator term"),
    ("I4", "adjoint of the second-order operator term"),
)


def _b1_omega_gap(assign) -> float:
    tf = kc.diagonal_two_form(model.kernel_of("F2"))
    # (i / 2 pi) mixed(F2) against b_1 (i / 2) delta_rq, i.e. mixed(F2) against pi b_1 delta_rq
    want = model.b1_poly().scale(ExactScalar.const(1, pi=1)) * Poly.term([delta(*RQ)])
    got = _table(tf.mixed, assign)
    gap = _rel(got, _table(want, assign))
    for blk in (tf.holo, tf.antiholo):
        gap = max(gap, float(np.max(np.abs(_table(blk, assign)), initial=0.0)))
    return gap


def _first_diverging(assign, tol) -> str:
    expected = model.expected_two_forms()
    for name, what in _TERM_TABLE:
        tf = kc.diagonal_two_form(model.kernel_of(name))
        if _two_form_gap(tf, expected[name], assign) > tol:
            return f"first diverging term: {name} ({what})"
    return "all per-term tables agree; the mismatch is in the final sum"


@_register("f2-two-form", "second-order coefficient's two-form equals b_1 times the symplectic form",
           "relative residual within {tol}; holomorphic blocks vanish")
def _f2_two_form(n, seed, D, tol):
    samples = _samples(n, seed)
    res = max(_b1_omega_gap(a) for a in samples)
    if res <= tol:
        return Outcome(res, True)
    bad = next(a for a in samples if _b1_omega_gap(a) > tol)
    return Outcome(res, False, _first_diverging(bad, tol))


@_register("f2-origin-value", "diagonal value of the second-order coefficient equals b_1",
           "relative residual within {tol}")
def _f2_origin(n, seed, D, tol):
    c = kc.eval_origin(model.kernel_of("F2"))
    b1 = model.b1_poly()
    res = max(_rel(numeric_eval(c, a), numeric_eval(b1, a)) for a in _samples(n, seed))
    return Outcome(res, res <= tol)


def _term_table_check(name, what):
    def fn(n, seed, D, tol):
        tf = kc.diagonal_two_form(model.kernel_of(name.split("-")[0]))
        want = model.expected_two_forms()[name]
        res = max(_two_form_gap(tf, want, a) for a in _samples(n, seed))
        return Outcome(res, res <= tol)
    return fn


_TERM_REFS = {
    "I1": "two-form of the double first-order term",
    "I2": "two-form of the second-order operator term",
    "I3": "two-form of the adjoint double first-order term",
    "I4": "two-form of the adjoint second-order operator term",
    "I5": "two-form of the first-order term composed with its adjoint",
    "I6": "two-form of the first-order adjoint composed with the squared inverse",
    "I21": "two-form of the curvature b b term",
    "I22": "two-form of the cubic curvature and second-derivative term",
    "I23": "two-form of the curvature b term",
    "I24": "two-form of the quadratic gradient term",
    "I25": "two-form of the Laplacian curvature term",
    "I26": "two-form of the quartic gradient term",
    "I2-unsubstituted": "two-form of the second-order operator term before the contracted curvature identity",
}

for _name, _ref in _TERM_REFS.items():
    _register(f"two-form-{_name.lower()}", _ref, "relative residual within {tol}")(_term_table_check(_name, _ref))


@_register("second-order-decomposition", "the second-order operator term splits into its six pieces",
           "symbolic equality", tol=0.0)
def _decomposition(n, seed, D, tol):
    total = model.kernel_of("I2")
    for k in range(1, 7):
        total = total + model.kernel_of(f"I2{k}")
    res = max(_coeff_max(total, a) for a in _samples(n, seed)) if total else 0.0
    return Outcome(res, total.is_zero())


@_register("adjoint-route-agreement", "adjoint route and direct composition route agree for the adjoint terms",
           "symbolic equality", tol=0.0)
def _adjoint_route(n, seed, D, tol):
    gaps = []
    ok = True
    for name in ("I3", "I4", "I5", "I6"):
        diff = model.kernel_of(name) - model.direct_route(name)
        if not diff.is_zero():
            ok = False
            gaps.append(max(_coeff_max(diff, a) for a in _samples(n, seed)))
    return Outcome(max(gaps, default=0.0), ok)


@_register("two-form-adjoint-consistency", "adjoint terms have conjugate-transposed mixed tables",
           "relative residual within {tol}")
def _adjoint_tables(n, seed, D, tol):
    res = 0.0
    for a in _samples(n, seed):
        for x, y in (("I1", "I3"), ("I2", "I4")):
            mx = _table(kc.diagonal_two_form(model.kernel_of(x)).mixed, a)
            my = _table(kc.diagonal_two_form(model.kernel_of(y)).mixed, a)
            res = max(res, _rel(my, mx.conj().T))
    return Outcome(res, res <= tol)


@_register("f2-self-adjoint", "the second-order coefficient is a self-adjoint kernel",
           "zero difference within {tol}; Hermitian mixed table")
def _self_adjoint(n, seed, D, tol):
    f2 = model.kernel_of("F2")
    diff = kc.adjoint(f2) - f2
    res = 0.0
    for a in _samples(n, seed):
        if diff:
            res = max(res, _coeff_max(diff, a))
        m = _table(kc.diagonal_two_form(f2).mixed, a)
        res = max(res, _rel(m, m.conj().T))
    return Outcome(res, res <= tol, "" if diff.is_zero() else "equal only after numeric instantiation")


@_register("f1-f2-parity", "F_1 is odd and F_2 is even in (Z, Z') jointly",
           "no monomial of the wrong parity", tol=0.0)
def _parity(n, seed, D, tol):
    bad = sum(1 for t, _ in model.kernel_of("F1").items() if _degree(t) % 2 == 0)
    bad += sum(1 for t, _ in model.kernel_of("F2").items() if _degree(t) % 2 == 1)
    return Outcome(float(bad), bad == 0)


def _family_independence(family):
    def fn(n, seed, D, tol):
        f1, f2 = model.kernel_of("F1"), model.kernel_of("F2")
        tf = kc.diagonal_two_form(f2)
        origin = kc.eval_origin(f2)
        tables = [tf.mixed, tf.holo, tf.antiholo]
        present = family in set().union(origin.families(), f1.families(), *(t.families() for t in tables))
        res = 0.0
        for a in _samples(n, seed):
            b = resample_family(a, family, a.seed + 1000)
            res = max(res, _rel(numeric_eval(origin, a), numeric_eval(origin, b)))
            for t in tables:
                res = max(res, _rel(_table(t, a), _table(t, b)))
            res = max(res, abs(_b1_omega_gap(a) - _b1_omega_gap(b)))
        return Outcome(res, not present and res <= tol, f"{family} appears symbolically" if present else "")
    return fn


_register("phi-independence", "verified outputs do not depend on the scalar potential term",
          "symbol absent and numeric invariance within {tol}")(_family_independence("Phi"))
_register("ddj-independence", "verified outputs do not depend on the pure second derivative of J",
          "symbol absent and numeric invariance within {tol}")(_family_independence("DDJ"))


# -- tensor identities ---------------------------------------------------------------

def _tensor_identity(lhs: Callable[[], Poly], rhs: Callable[[], Poly], free=RQ):
    def fn(n, seed, D, tol):
        res = 0.0
        for a in _samples(n, seed):
            res = max(res, _rel(numeric_eval(lhs(), a, free), numeric_eval(rhs(), a, free)))
        return Outcome(res, res <= tol)
    return fn


def _p(*terms):
    return model.poly(*terms)


T = model.T


@_register("sampler-constraints", "admissible samples satisfy antisymmetry, the cyclic relation and the contracted curvature identity",
           "residuals within {tol}", tol=1e-12)
def _sampler(n, seed, D, tol):
    res = max(max(cyclic_residual(a), contracted_constraint_residual(a)) for a in _samples(n, seed))
    return Outcome(res, res <= tol)


_register("curvature-gradient-norm", "pure curvature trace equals |nabla J|^2 / 32", "relative residual within {tol}")(
    _tensor_identity(lambda: _p((1, T("R", "#i #j #i~ #j~"))),
                     lambda: model.grad_j_sq().scale(ExactScalar.const(Fraction(1, 32))), free=()))
_register("gradient-pairing-trace", "traced gradient pairing equals |nabla J|^2 / 16", "relative residual within {tol}")(
    _tensor_identity(lambda: _p((2, T("J", "#i #q #s"), T("J", "#q~ #i~ #s~"))),
                     lambda: model.grad_j_sq().scale(ExactScalar.const(Fraction(1, 16))), free=()))
_register("gradient-pairing-symmetrized", "symmetrized gradient pairing in terms of J", "relative residual within {tol}")(
    _tensor_identity(lambda: _p((2, T("J", "#i r #s"), T("J", "#i~ q~ #s~")), (2, T("J", "#i r #s"), T("J", "q~ #i~ #s~"))),
                     lambda: _p((4, T("J", "#i #j r"), T("J", "#i~ #j~ q~")), (-2, T("J", "#i #j r"), T("J", "#j~ #i~ q~")))))
_register("gradient-pairing-swapped", "gradient pairing with swapped arguments in terms of J", "relative residual within {tol}")(
    _tensor_identity(lambda: _p((2, T("J", "r #i #s"), T("J", "q~ #i~ #s~"))),
                     lambda: _p((4, T("J", "#i #j r"), T("J", "#i~ #j~ q~")), (-4, T("J", "#i #j r"), T("J", "#j~ #i~ q~")))))
_register("gradient-pairing-conjugate", "conjugate gradient pairing in terms of J", "relative residual within {tol}")(
    _tensor_identity(lambda: _p((2, T("J", "r #i #s"), T("J", "#i~ q~ #s~"))),
                     lambda: _p((2, T("J", "#i #j r"), T("J", "#i~ #j~ q~")), (-2, T("J", "#i #j r"), T("J", "#j~ #i~ q~")))))
_register("gradient-pairing-mixed", "mixed gradient pairing in terms of J", "relative residual within {tol}")(
    _tensor_identity(lambda: _p((2, T("J", "#i r #s"), T("J", "q~ #i~ #s~"))),
                     lambda: _p((2, T("J", "#i #j r"), T("J", "#i~ #j~ q~")), (-2, T("J", "#i #j r"), T("J", "#j~ #i~ q~")))))
_register("curvature-bianchi-trace", "first Bianchi identity traced over a holomorphic pair", "relative residual within {tol}")(
    _tensor_identity(lambda: _p((1, T("R", "#j #j~ r q~"))),
                     lambda: _p((1, T("R", "r #j~ #j q~")), (1, T("R", "#j r #j~ q~")))))


# -- oracle equivalence ----------------------------------------------------------------

_ORACLE_D = {1: 12, 2: 10, 3: 9, 4: 6}
_ORACLE_TERMS = ("F1", "I1", "I2", "I3", "I4", "I5", "I6",
                 "I21", "I22", "I23", "I24", "I25", "I26", "I27")


def _oracle_check(name):
    def fn(n, seed, D, tol):
        D = D or _ORACLE_D[n]
        basis = orc.fock_basis(n, D)
        assign = sample_admissible(n, seed)
        x = orc.matrix_of(model.defining_expr(name), basis, assign)
        y = orc.kernel_matrix(model.kernel_of(name), basis, assign)
        try:
            res = orc.compare(x, y, basis, min_valid=1)
        except orc.BudgetError as err:
            return Outcome(float("inf"), False, str(err), D)
        return Outcome(res, res <= tol, D=D)
    return fn


for _name in _ORACLE_TERMS:
    _register(f"oracle-{_name.lower()}", f"matrix of the defining operator word equals matrix of the {_name} kernel",
              "relative residual within {tol}")(_oracle_check(_name))


@_register("oracle-truncation-stability", "enlarging the truncation does not change exact blocks",
           "change within {tol}", tol=1e-12)
def _truncation(n, seed, D, tol):
    D = D or _ORACLE_D[n] - 2
    assign = sample_admissible(n, seed)
    small, big = orc.fock_basis(n, D), orc.fock_basis(n, D + 2)
    res = 0.0
    for name in ("F1", "I5", "I26"):
        a = orc.kernel_matrix(model.kernel_of(name), small, assign)
        b = orc.kernel_matrix(model.kernel_of(name), big, assign)
        keep = [s for s in small.states if sum(s) <= a.valid]
        rows = [s for s in small.states]
        ia = np.ix_([small.index[s] for s in rows], [small.index[s] for s in keep])
        ib = np.ix_([big.index[s] for s in rows], [big.index[s] for s in keep])
        res = max(res, float(np.max(np.abs(a.mat.toarray()[ia] - b.mat.toarray()[ib]), initial=0.0)))
    return Outcome(res, res <= tol, D=D)


@_register("oracle-adjoint-matrix", "adjoint kernel's matrix is the conjugate transpose",
           "relative residual within {tol}", tol=1e-10)
def _adjoint_matrix(n, seed, D, tol):
    D = D or _ORACLE_D[n]
    basis = orc.fock_basis(n, D)
    assign = sample_admissible(n, seed)
    rng = np.random.default_rng([seed, n, 11])
    res = 0.0
    for K in [model.kernel_of("A")] + [random_kernel(rng, n) for _ in range(10)]:
        m = orc.kernel_matrix(K, basis, assign)
        ma = orc.kernel_matrix(kc.adjoint(K), basis, assign)
        s = np.flatnonzero(basis.degree <= min(m.valid, ma.valid))
        x = ma.mat.toarray()[np.ix_(s, s)]
        y = m.mat.toarray()[np.ix_(s, s)].conj().T
        res = max(res, _rel(x, y))
    return Outcome(res, res <= tol, D=D)


def _nf_matrix(nf: Poly, basis, assign):
    out = None
    for term, c in nf.items():
        word = [f[1] for f in term if f[0] == "B"]
        head = Poly.term([f for f in term if f[0] != "B"], c)
        m = orc.kernel_matrix(head, basis, assign)
        for lab in reversed(word):
            m = basis.b[int(lab) - 1] @ m
        out = m if out is None else out + m
    return out


@_register("oracle-normal-form-roundtrip", "normal form read as b-words on heads reproduces the kernel's matrix",
           "relative residual within {tol}", tol=1e-10)
def _nf_roundtrip_oracle(n, seed, D, tol):
    D = D or _ORACLE_D[n]
    basis = orc.fock_basis(n, D)
    assign = sample_admissible(n, seed)
    rng = np.random.default_rng([seed, n, 13])
    res = 0.0
    for _ in range(10):
        K = random_kernel(rng, n)
        x = _nf_matrix(kc.left_normal_form(K), basis, assign)
        y = orc.kernel_matrix(K, basis, assign)
        if x is None:
            continue
        res = max(res, orc.compare(x, y, basis))
    return Outcome(res, res <= tol, D=D)


@_register("oracle-projector-quartic", "vacuum entry of P composed with zbar zbar z z P",
           "2 / pi^2 within {tol}", tol=1e-10)
def _oracle_quartic(n, seed, D, tol):
    D = D or _ORACLE_D[n]
    basis = orc.fock_basis(n, D)
    assign = sample_admissible(n, seed)
    k = Poly.term([var("zb", "1"), var("zb", "1"), var("z", "1"), var("z", "1")])
    m = orc.matrix_of(ex.Compose(ex.LeafP(), ex.LeafKernel(k)), basis, assign)
    v = basis.index[(0,) * (2 * n)]
    res = abs(m.mat[v, v] - 2 / math.pi**2)
    return Outcome(float(res), res <= tol, D=D)


@_register("oracle-inverse-b-z", "inverse Laplacian of b z P is b z P over 4 pi",
           "relative residual within {tol}", tol=1e-10)
def _oracle_inverse(n, seed, D, tol):
    D = D or _ORACLE_D[n]
    basis = orc.fock_basis(n, D)
    assign = sample_admissible(n, seed)
    w = ex.ApplyB("1", ex.MultiplyVar("z", "1", ex.LeafP()))
    x = orc.matrix_of(ex.Inv(1, ex.Offdiag(w)), basis, assign)
    y = orc.matrix_of(w, basis, assign).scale(1 / (4 * math.pi))
    res = orc.compare(x, y, basis)
    return Outcome(res, res <= tol, D=D)


# -- structural properties ---------------------------------------------------------

def random_kernel(rng: np.random.Generator, n: int, max_degree: int = 4, terms: int = 3) -> Poly:
    """Random kernel with concrete indices and Gaussian-rational coefficients."""
    kinds = ("z", "zb", "zp", "zbp")
    items = []
    for _ in range(terms):
        deg = int(rng.integers(0, max_degree + 1))
        facs = [var(kinds[int(rng.integers(4))], str(int(rng.integers(1, n + 1)))) for _ in range(deg)]
        c = ExactScalar.const(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)), pi=int(rng.integers(-1, 2)))
        items.append((facs, c))
    return Poly.from_terms(items)


def _property(pred, arity=1, max_degree=4, terms=3):
    def fn(n, seed, D, tol):
        rng = np.random.default_rng([seed, n, 17])
        fails = 0
        for _ in range(PROPERTY_CASES):
            ks = [random_kernel(rng, n, max_degree, terms) for _ in range(arity)]
            if not pred(*ks):
                fails += 1
        return Outcome(float(fails), fails == 0, f"{fails} of {PROPERTY_CASES} cases failed" if fails else "")
    return fn


_register("adjoint-involution", "adjoint applied twice is the identity", "zero failures", tol=0.0)(
    _property(lambda k: kc.adjoint(kc.adjoint(k)) == k))
_register("adjoint-antihomomorphism", "adjoint reverses composition", "zero failures", tol=0.0)(
    _property(lambda a, b: kc.adjoint(kc.compose(a, b)) == kc.compose(kc.adjoint(b), kc.adjoint(a)),
              arity=2, terms=2))
_register("projection-idempotent", "projection onto the kernel of L is idempotent", "zero failures", tol=0.0)(
    _property(lambda k: kc.project_ker(kc.project_ker(k)) == kc.project_ker(k)))
_register("projection-kills-inverse", "projection annihilates the inverse Laplacian's range", "zero failures", tol=0.0)(
    _property(lambda k: kc.project_ker(kc.apply_inv_offdiag(k, 1)).is_zero()))


def _laplacian_of(k: Poly, n: int) -> Poly:
    out = Poly()
    for j in range(1, n + 1):
        out = out + kc.apply_b(kc.apply_bplus(k, str(j)), str(j))
    return out


@_register("inverse-laplacian-identity", "Laplacian after its inverse is the complementary projection",
           "zero failures", tol=0.0)
def _inv_identity(n, seed, D, tol):
    return _property(lambda k: _laplacian_of(kc.apply_inv_offdiag(k, 1), n) == kc.offdiag(k),
                     max_degree=6)(n, seed, D, tol)


_register("compose-associative", "composition of kernels is associative", "zero failures", tol=0.0)(
    _property(lambda a, b, c: kc.compose(kc.compose(a, b), c) == kc.compose(a, kc.compose(b, c)),
              arity=3, terms=2))
_register("compose-with-projector", "composing with P projects on either side", "zero failures", tol=0.0)(
    _property(lambda k: kc.compose(kc.P, k) == kc.expand_left(kc.project_ker(k))
              and kc.compose(k, kc.P) == kc.adjoint(kc.compose(kc.P, kc.adjoint(k)))))
_register("normal-form-roundtrip", "expanding the normal form returns the kernel", "zero failures", tol=0.0)(
    _property(lambda k: kc.expand_left(kc.left_normal_form(k)) == k
              and kc.expand_right(kc.right_normal_form(k)) == k))
_register("normal-form-confluence", "peeling order does not change the normal form", "zero failures", tol=0.0)(
    _property(lambda k: kc.left_normal_form(k, last=True) == kc.left_normal_form(k)
              and kc.right_normal_form(k, last=True) == kc.right_normal_form(k)))
