"""Exact coefficient ring Q(i)[pi, 1/pi, n].

An :class:`ExactScalar` is a finite sum of Gaussian rationals times integer
powers of ``pi`` and nonnegative powers of the formal dimension ``n``.
Values are immutable and hashable; arithmetic never touches floating point.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

__all__ = ["ExactScalar", "ONE", "ZERO", "I", "PI", "N", "as_scalar"]

Number = Union[int, Fraction]
_Key = tuple[int, int]  # (pi exponent, n exponent)
_Gauss = tuple[Fraction, Fraction]  # (real, imaginary)


class ExactScalar:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict[_Key, _Gauss] | Iterable[tuple[_Key, _Gauss]] = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        clean = []
        for (pk, nk), (re_, im_) in items:
            if nk < 0:
                raise ValueError("n exponents must be nonnegative")
            re_, im_ = Fraction(re_), Fraction(im_)
            if re_ or im_:
                clean.append(((int(pk), int(nk)), (re_, im_)))
        clean.sort()
        self._terms: tuple[tuple[_Key, _Gauss], ...] = tuple(clean)
        self._hash = hash(self._terms)

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, re_: Number = 0, im_: Number = 0, pi: int = 0, n: int = 0) -> "ExactScalar":
        return cls({(pi, n): (Fraction(re_), Fraction(im_))})

    @property
    def terms(self) -> dict[_Key, _Gauss]:
        return dict(self._terms)

    # -- ring operations ----------------------------------------------------
    def __add__(self, other) -> "ExactScalar":
        other = as_scalar(other)
        acc = dict(self._terms)
        for k, (a, b) in other._terms:
            if k in acc:
                c, d = acc[k]
                acc[k] = (c + a, d + b)
            else:
                acc[k] = (a, b)
        return ExactScalar(acc)

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar({k: (-a, -b) for k, (a, b) in self._terms})

    def __sub__(self, other) -> "ExactScalar":
        return self + (-as_scalar(other))

    def __rsub__(self, other) -> "ExactScalar":
        return as_scalar(other) - self

    def __mul__(self, other) -> "ExactScalar":
        other = as_scalar(other)
        acc: dict[_Key, _Gauss] = {}
        for (p1, n1), (a, b) in self._terms:
            for (p2, n2), (c, d) in other._terms:
                k = (p1 + p2, n1 + n2)
                re_, im_ = a * c - b * d, a * d + b * c
                if k in acc:
                    x, y = acc[k]
                    acc[k] = (x + re_, y + im_)
                else:
                    acc[k] = (re_, im_)
        return ExactScalar(acc)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactScalar":
        return self * as_scalar(other).inverse()

    def __rtruediv__(self, other) -> "ExactScalar":
        return as_scalar(other) * self.inverse()

    def __pow__(self, k: int) -> "ExactScalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "ExactScalar":
        """Inverse of a single-term scalar (monomial in pi, no n)."""
        if len(self._terms) != 1:
            raise ZeroDivisionError("only monomial scalars are invertible in this ring")
        (pk, nk), (a, b) = self._terms[0]
        if nk:
            raise ZeroDivisionError("n is not invertible")
        den = a * a + b * b
        return ExactScalar({(-pk, 0): (a / den, -b / den)})

    def conj(self) -> "ExactScalar":
        return ExactScalar({k: (a, -b) for k, (a, b) in self._terms})

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = as_scalar(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return self._hash

    def is_rational(self) -> bool:
        return all(k == (0, 0) and b == 0 for k, (a, b) in self._terms)

    def pi_power_range(self) -> tuple[int, int]:
        ks = [k[0] for k, _ in self._terms]
        return (min(ks), max(ks)) if ks else (0, 0)

    # -- numerics -----------------------------------------------------------
    def evaluate(self, n: int | float = 0) -> complex:
        """Substitute pi -> math.pi, n -> ``n``, sqrt(-1) -> 1j."""
        total = 0j
        for (pk, nk), (a, b) in self._terms:
            total += complex(float(a), float(b)) * math.pi**pk * float(n) ** nk
        return total

    # -- text -----------------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(_render_term(k, g) for k, g in self._terms)

    def __repr__(self) -> str:
        return f"ExactScalar({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        text = text.strip()
        if text == "0":
            return ZERO
        acc = ZERO
        pos = 0
        for m in _TERM_RE.finditer(text):
            if text[pos:m.start()].strip() not in ("", "+"):
                raise ValueError(f"cannot parse scalar near {text[pos:m.start()]!r}")
            pos = m.end()
            re_, im_ = Fraction(m["re"]), Fraction(m["im"])
            pk = int(m["pk"]) if m["pk"] is not None else 0
            nk = int(m["nk"]) if m["nk"] is not None else 0
            acc = acc + cls({(pk, nk): (re_, im_)})
        if text[pos:].strip():
            raise ValueError(f"cannot parse scalar near {text[pos:]!r}")
        return acc


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _render_term(key: _Key, g: _Gauss) -> str:
    pk, nk = key
    re_, im_ = g
    sign = "+" if im_ >= 0 else "-"
    out = f"({_fmt(re_)}{sign}{_fmt(abs(im_))}i)"
    if pk:
        out += f"·π^{pk}"
    if nk:
        out += f"·n^{nk}"
    return out


_Q = r"-?\d+(?:/\d+)?"
_TERM_RE = re.compile(
    rf"\((?P<re>{_Q})(?P<im>[+-]\d+(?:/\d+)?)i\)(?:·π\^(?P<pk>-?\d+))?(?:·n\^(?P<nk>\d+))?"
)


def as_scalar(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactScalar({(0, 0): (Fraction(x), Fraction(0))})
    raise TypeError(f"cannot convert {type(x).__name__} to ExactScalar")


ZERO = ExactScalar()
ONE = ExactScalar.const(1)
I = ExactScalar.const(0, 1)
PI = ExactScalar.const(1, pi=1)
N = ExactScalar.const(1, n=1)
