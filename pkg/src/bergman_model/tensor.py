"""Indexed polynomials over the geometric coefficient families.

A term is a product of *factors*, each a plain tuple:

* ``('T', family, slots)``: a tensor component; ``slots`` is a tuple of
  ``(label, barred)`` pairs.  Families: ``J`` (3 slots), ``R`` (4),
  ``DDJ`` (4) and ``Phi`` (0).
* ``('d', a, b)``: a Kronecker delta.
* ``('v', kind, label)``: a coordinate variable, ``kind`` one of
  ``z``, ``zb``, ``zp``, ``zbp`` (unprimed/primed, plain/conjugate).
* ``('B', label)`` / ``('BR', label)``: a pending left ``b`` or right
  ``b^+`` application (used only by the Fock normal form).

Labels are strings.  Labels starting with ``#`` are summed over ``1..n``
(dummies) and may occur any number of times in a term; digit strings are
concrete index values; anything else is a free index.  A :class:`Poly` maps
canonical terms to :class:`ExactScalar` coefficients.  The same class carries
tensor-only coefficients and kernel polynomials, so ``TensorPoly`` and
``KernelPoly`` are aliases.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .scalar import ONE, ZERO, N, ExactScalar, as_scalar

__all__ = [
    "FAMILY_ARITY",
    "Poly",
    "TensorPoly",
    "KernelPoly",
    "tensor",
    "delta",
    "var",
    "is_dummy",
    "is_concrete",
    "normalize_term",
    "numeric_eval",
    "expand_concrete",
    "term_labels",
    "free_labels",
]

FAMILY_ARITY = {"J": 3, "R": 4, "DDJ": 4, "Phi": 0}
VAR_KINDS = ("z", "zb", "zp", "zbp")
CONJ_KIND = {"z": "zb", "zb": "z", "zp": "zbp", "zbp": "zp"}

Factor = tuple
Term = tuple


def is_dummy(label: str) -> bool:
    return label.startswith("#")


def is_concrete(label: str) -> bool:
    return label.isdigit()


# -- factor constructors -----------------------------------------------------

def tensor(family: str, *slots: tuple[str, bool]) -> Factor:
    if family not in FAMILY_ARITY:
        raise ValueError(f"unknown tensor family {family!r}")
    if len(slots) != FAMILY_ARITY[family]:
        raise ValueError(f"{family} takes {FAMILY_ARITY[family]} indices, got {len(slots)}")
    return ("T", family, tuple((str(l), bool(b)) for l, b in slots))


def delta(a: str, b: str) -> Factor:
    a, b = str(a), str(b)
    return ("d",) + tuple(sorted((a, b)))


def var(kind: str, label: str) -> Factor:
    if kind not in VAR_KINDS:
        raise ValueError(f"unknown variable kind {kind!r}")
    return ("v", kind, str(label))


def factor_labels(f: Factor) -> list[str]:
    tag = f[0]
    if tag == "T":
        return [l for l, _ in f[2]]
    if tag == "d":
        return [f[1], f[2]]
    if tag == "v":
        return [f[2]]
    return [f[1]]


def relabel_factor(f: Factor, mapping: dict[str, str]) -> Factor:
    tag = f[0]
    if tag == "T":
        return ("T", f[1], tuple((mapping.get(l, l), b) for l, b in f[2]))
    if tag == "d":
        return delta(mapping.get(f[1], f[1]), mapping.get(f[2], f[2]))
    if tag == "v":
        return ("v", f[1], mapping.get(f[2], f[2]))
    return (tag, mapping.get(f[1], f[1]))


def term_labels(term: Iterable[Factor]) -> list[str]:
    out = []
    for f in term:
        out.extend(factor_labels(f))
    return out


# -- symmetry data -----------------------------------------------------------

def _variants(f: Factor) -> list[tuple[tuple, int]]:
    """Slot orderings equivalent to ``f`` under the family sign symmetries."""
    fam, s = f[1], f[2]
    if fam == "J":
        return [(s, 1), ((s[0], s[2], s[1]), -1)]
    if fam == "R":
        out = []
        for pair in (False, True):
            a, b, c, d = (s[2], s[3], s[0], s[1]) if pair else s
            for sw1 in (False, True):
                for sw2 in (False, True):
                    x = (b, a) if sw1 else (a, b)
                    y = (d, c) if sw2 else (c, d)
                    out.append((x + y, -1 if sw1 != sw2 else 1))
        return out
    return [(s, 1)]


def _vanishes(f: Factor) -> bool:
    if f[0] != "T":
        return False
    fam, s = f[1], f[2]
    if fam in ("J", "DDJ") and len({b for _, b in s}) > 1:
        return True  # mixed-type components are zero
    if fam == "J" and s[1] == s[2]:
        return True
    if fam == "R" and (s[0] == s[1] or s[2] == s[3]):
        return True
    return False


# -- normalization -----------------------------------------------------------

def normalize_term(factors: Sequence[Factor], coeff: ExactScalar):
    """Contract deltas, apply vanishing rules and canonicalize.

    Returns ``(key, coeff)`` or ``None`` when the term is zero.
    """
    facs = list(factors)
    changed = True
    while changed:
        changed = False
        for idx, f in enumerate(facs):
            if f[0] != "d":
                continue
            a, b = f[1], f[2]
            if a == b:
                del facs[idx]
                if is_dummy(a) and a not in term_labels(facs):
                    coeff = coeff * N
                changed = True
                break
            if is_dummy(a) or is_dummy(b):
                d, o = (a, b) if is_dummy(a) else (b, a)
                del facs[idx]
                facs = [relabel_factor(x, {d: o}) for x in facs]
                changed = True
                break
            if is_concrete(a) and is_concrete(b):
                return None
    for f in facs:
        if _vanishes(f):
            return None
    res = _canonical(tuple(sorted(facs)))
    if res is None:
        return None
    key, sign = res
    return key, (coeff if sign > 0 else -coeff)


def _base(f: Factor) -> tuple:
    return (f[0], f[1]) if f[0] in ("T", "v") else (f[0],)


def _slots(f: Factor) -> list[tuple[str, bool]]:
    tag = f[0]
    if tag == "T":
        return list(f[2])
    if tag == "d":
        return [(f[1], False), (f[2], False)]
    if tag == "v":
        return [(f[2], False)]
    return [(f[1], False)]


def _rebuild(f: Factor, slots) -> Factor:
    tag = f[0]
    if tag == "T":
        return ("T", f[1], tuple(slots))
    if tag == "d":
        return ("d",) + tuple(sorted((slots[0][0], slots[1][0])))
    if tag == "v":
        return ("v", f[1], slots[0][0])
    return (tag, slots[0][0])


_MAX_COMBOS = 200_000


def _components(facs: tuple) -> list[tuple]:
    """Split factors into groups linked by shared dummies."""
    parent = list(range(len(facs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    seen: dict[str, int] = {}
    for i, f in enumerate(facs):
        for lab, _ in _slots(f):
            if is_dummy(lab):
                if lab in seen:
                    parent[find(i)] = find(seen[lab])
                else:
                    seen[lab] = i
    groups: dict[int, list] = {}
    for i, f in enumerate(facs):
        groups.setdefault(find(i), []).append(f)
    return [tuple(g) for g in groups.values()]


def _offset_dummies(key: tuple, offset: int) -> tuple:
    if not offset:
        return key
    out = []
    for f in key:
        slots = [(f"#{int(l[1:]) + offset}" if is_dummy(l) else l, b) for l, b in _slots(f)]
        out.append(_rebuild(f, slots))
    return tuple(out)


@lru_cache(maxsize=500_000)
def _canonical(facs: tuple) -> tuple[tuple, int] | None:
    """Canonical representative modulo dummy renaming and sign symmetries.

    Components that share no dummy are canonicalized on their own, then sorted.
    """
    comps = _components(facs)
    if len(comps) == 1:
        return _canonical_connected(facs)
    parts, sign = [], 1
    for c in comps:
        res = _canonical_connected(tuple(sorted(c)))
        if res is None:
            return None
        parts.append(res[0])
        sign *= res[1]
    out, offset = [], 0
    for key in sorted(parts):
        out.extend(_offset_dummies(key, offset))
        offset += len({l for f in key for l, _ in _slots(f) if is_dummy(l)})
    return tuple(out), sign


@lru_cache(maxsize=500_000)
def _canonical_connected(facs: tuple) -> tuple[tuple, int] | None:
    """Brute-force canonical form over factor orders and slot symmetries."""
    sig: dict[str, list] = {}
    for f in facs:
        for lab, bar in _slots(f):
            if is_dummy(lab):
                sig.setdefault(lab, []).append((_base(f), bar))
    sig_t = {k: tuple(sorted(v)) for k, v in sig.items()}

    def shape(f):
        return (_base(f), tuple(sorted(
            ("_", bar, sig_t[lab]) if is_dummy(lab) else (lab, bar, ()) for lab, bar in _slots(f)
        )))

    order = sorted(range(len(facs)), key=lambda i: shape(facs[i]))
    groups: list[list[int]] = []
    last = None
    for i in order:
        sh = shape(facs[i])
        if sh != last:
            groups.append([])
            last = sh
        groups[-1].append(i)

    group_perms = [list(itertools.permutations(g)) for g in groups]
    variants = [
        _variants(f) if f[0] == "T" else [(tuple(_slots(f)), 1)] for f in facs
    ]
    n_combos = 1
    for gp in group_perms:
        n_combos *= len(gp)
    for v in variants:
        n_combos *= len(v)
    if n_combos > _MAX_COMBOS:
        raise RuntimeError(f"canonicalization too expensive ({n_combos} combinations)")

    best = None
    signs: set[int] = set()
    var_choices = [range(len(v)) for v in variants]
    for perm_choice in itertools.product(*group_perms):
        seq = [i for p in perm_choice for i in p]
        for vc in itertools.product(*(var_choices[i] for i in seq)):
            mapping: dict[str, str] = {}
            out = []
            sign = 1
            for i, c in zip(seq, vc):
                slots, s = variants[i][c]
                sign *= s
                new = []
                for lab, bar in slots:
                    if is_dummy(lab):
                        if lab not in mapping:
                            mapping[lab] = f"#{len(mapping)}"
                        lab = mapping[lab]
                    new.append((lab, bar))
                out.append(_rebuild(facs[i], new))
            key = tuple(out)
            if best is None or key < best:
                best, signs = key, {sign}
            elif key == best:
                signs.add(sign)
    if best is None:
        return (), 1
    if len(signs) > 1:
        return None
    return best, signs.pop()


# -- the polynomial container -----------------------------------------------

class Poly:
    """Finite sum of canonical indexed terms with exact coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict | None = None):
        self._terms: dict[Term, ExactScalar] = dict(terms) if terms else {}
        self._hash = None

    @classmethod
    def from_terms(cls, items: Iterable[tuple[Sequence[Factor], ExactScalar]]) -> "Poly":
        acc: dict[Term, ExactScalar] = {}
        for factors, coeff in items:
            coeff = as_scalar(coeff)
            if coeff.is_zero():
                continue
            res = normalize_term(factors, coeff)
            if res is None:
                continue
            key, c = res
            acc[key] = acc[key] + c if key in acc else c
        return cls({k: v for k, v in acc.items() if not v.is_zero()})

    @classmethod
    def term(cls, factors: Sequence[Factor] = (), coeff=ONE) -> "Poly":
        return cls.from_terms([(factors, as_scalar(coeff))])

    @classmethod
    def const(cls, c) -> "Poly":
        return cls.term((), c)

    def items(self) -> Iterator[tuple[Term, ExactScalar]]:
        return iter(sorted(self._terms.items(), key=lambda kv: kv[0]))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            s = acc[k] + v if k in acc else v
            if s.is_zero():
                acc.pop(k, None)
            else:
                acc[k] = s
        return Poly(acc)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = as_scalar(c)
        if c.is_zero():
            return Poly()
        return Poly({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, ExactScalar)) or not isinstance(other, Poly):
            return self.scale(other)
        items = []
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                items.append((list(k1) + _shift_dummies(k2), c1 * c2))
        return Poly.from_terms(items)

    __rmul__ = __mul__

    def map_terms(self, fn) -> "Poly":
        """Apply ``fn(term, coeff) -> iterable of (factors, coeff)`` and renormalize."""
        items = []
        for k, c in self._terms.items():
            items.extend(fn(k, c))
        return Poly.from_terms(items)

    def relabel(self, mapping: dict[str, str]) -> "Poly":
        return self.map_terms(lambda k, c: [([relabel_factor(f, mapping) for f in k], c)])

    def sum_over(self, label: str) -> "Poly":
        """Sum the free label ``label`` over ``1..n`` (turn it into a dummy)."""
        def fn(k, c):
            labs = term_labels(k)
            if label not in labs:
                return [(k, c * N)]
            d = _fresh_dummy(labs)
            return [([relabel_factor(f, {label: d}) for f in k], c)]
        return self.map_terms(fn)

    def conjugate(self) -> "Poly":
        """Complex conjugate: conjugate scalars, swap every bar and variable kind."""
        def fn(k, c):
            out = []
            for f in k:
                if f[0] == "T":
                    out.append(("T", f[1], tuple((l, not b) for l, b in f[2])))
                elif f[0] == "v":
                    out.append(("v", CONJ_KIND[f[1]], f[2]))
                elif f[0] == "d":
                    out.append(f)
                else:
                    raise ValueError("cannot conjugate pending operator factors")
            return [(out, c.conj())]
        return self.map_terms(fn)

    def free_labels(self) -> set[str]:
        out = set()
        for k in self._terms:
            out.update(l for l in term_labels(k) if not is_dummy(l) and not is_concrete(l))
        return out

    def families(self) -> set[str]:
        return {f[1] for k in self._terms for f in k if f[0] == "T"}

    def filter(self, pred) -> "Poly":
        return Poly({k: v for k, v in self._terms.items() if pred(k)})

    def __repr__(self) -> str:
        from .render import render_poly_math
        return f"Poly({render_poly_math(self)})"


TensorPoly = Poly
KernelPoly = Poly


def _shift_dummies(term: Term) -> list[Factor]:
    mapping = {l: "#r" + l[1:] for l in term_labels(term) if is_dummy(l)}
    return [relabel_factor(f, mapping) for f in term]


def _fresh_dummy(labels: Iterable[str]) -> str:
    used = set(labels)
    k = 0
    while f"#s{k}" in used:
        k += 1
    return f"#s{k}"


def free_labels(term: Term) -> list[str]:
    return sorted({l for l in term_labels(term) if not is_dummy(l) and not is_concrete(l)})


# -- numerics ----------------------------------------------------------------

def _tensor_operand(f: Factor, assign, n: int):
    """Array for a tensor factor plus the labels of its remaining axes."""
    if f[0] == "d":
        return np.eye(n), [f[1], f[2]]
    fam, slots = f[1], f[2]
    arr = assign.component(fam, tuple(b for _, b in slots))
    return arr, [l for l, _ in slots]


def _contract(term: Term, coeff: ExactScalar, assign, values: dict[str, int], out: list[str]):
    """Einstein-contract the coefficient part of ``term`` into an array over ``out``."""
    n = assign.n
    operands = []
    ids: dict[str, int] = {}

    def lid(l):
        if l not in ids:
            ids[l] = len(ids)
        return ids[l]

    for f in term:
        if f[0] not in ("T", "d"):
            continue
        arr, labs = _tensor_operand(f, assign, n)
        index = []
        sub = []
        for l in labs:
            if is_concrete(l) or l in values:
                v = int(l) if is_concrete(l) else values[l]
                if not 1 <= v <= n:
                    raise ValueError(f"index value {v} out of range 1..{n}")
                index.append(v - 1)
            else:
                if not is_dummy(l) and l not in out:
                    raise ValueError(f"free index {l!r} has no value")
                index.append(slice(None))
                sub.append(lid(l))
        operands += [arr[tuple(index)], sub]
    for l in out:
        if l not in ids:
            operands += [np.ones(n), [lid(l)]]
    c = coeff.evaluate(n)
    if not operands:
        return np.asarray(c, dtype=complex)
    res = np.einsum(*operands, [ids[l] for l in out], optimize=False)
    return c * np.asarray(res, dtype=complex)


def numeric_eval(poly: Poly, assign, free: Sequence[str] = (), values: dict | None = None) -> np.ndarray:
    """Evaluate a variable-free polynomial; returns an array over ``free``."""
    values = dict(values or {})
    n = assign.n
    total = np.zeros((n,) * len(free), dtype=complex)
    for term, coeff in poly.items():
        if any(f[0] not in ("T", "d") for f in term):
            raise ValueError("numeric_eval expects a polynomial without variables")
        total = total + _contract(term, coeff, assign, values, list(free))
    return total


def expand_concrete(poly: Poly, assign, values: dict | None = None) -> dict[tuple, complex]:
    """Expand all sums: map concrete monomials to complex coefficients.

    A monomial is a sorted tuple of ``(tag, index)`` pairs where ``tag`` is a
    variable kind or ``'B'``/``'BR'``.
    """
    values = dict(values or {})
    n = assign.n
    acc: dict[tuple, complex] = {}
    for term, coeff in poly.items():
        outer = []
        for f in term:
            if f[0] in ("v", "B", "BR"):
                l = factor_labels(f)[0]
                if is_dummy(l) and l not in outer:
                    outer.append(l)
                elif not is_dummy(l) and not is_concrete(l) and l not in values:
                    raise ValueError(f"free index {l!r} has no value")
        arr = _contract(term, coeff, assign, values, outer)
        mono_factors = [f for f in term if f[0] in ("v", "B", "BR")]
        for idx in np.ndindex(*arr.shape):
            c = arr[idx]
            if c == 0:
                continue
            local = {l: i + 1 for l, i in zip(outer, idx)}
            mono = []
            for f in mono_factors:
                l = factor_labels(f)[0]
                v = local[l] if is_dummy(l) else (int(l) if is_concrete(l) else values[l])
                if not 1 <= v <= n:
                    raise ValueError(f"index value {v} out of range 1..{n}")
                mono.append((f[1] if f[0] == "v" else f[0], v))
            key = tuple(sorted(mono))
            acc[key] = acc.get(key, 0) + complex(c)
    return acc
