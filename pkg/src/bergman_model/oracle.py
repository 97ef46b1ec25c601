"""Matrix oracle on a degree-truncated oscillator basis.

The model space carries two commuting families of ladder operators:
``b_j, b_j^+`` (the generators) and ``bt_j = -2 d/dzbar_j + pi z_j`` with its
adjoint ``bt_j^+ = 2 d/dz_j + pi zbar_j``.  Both satisfy ``[x, x^+] = -4 pi``
and together they diagonalize the model: the states
``b^alpha bt^beta exp(-pi |z|^2 / 2)``, normalized, form an orthonormal basis
in which the 𝓛-eigenvalue of ``(alpha, beta)`` is ``4 pi |alpha|`` and ``P``
projects onto ``alpha = 0``.  Coordinates are ``z = (bt + b^+)/2pi`` and
``zbar = (b + bt^+)/2pi``.

Truncating to ``|alpha| + |beta| <= D`` makes every matrix exact only on the
columns of low degree; :class:`FockMatrix` tracks that block and
:func:`compare` refuses to compare outside it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from . import expr as ex
from .tensor import Poly, expand_concrete, is_concrete

__all__ = [
    "BudgetError",
    "FockBasis",
    "FockMatrix",
    "fock_basis",
    "matrix_of",
    "kernel_matrix",
    "compare",
    "residual_report",
    "state_norm_sq",
    "gram_matrix",
    "quadrature_norm_sq",
    "laplacian_spectrum",
]


class BudgetError(RuntimeError):
    """The truncation degree is too small for the requested comparison."""


@dataclass(frozen=True)
class FockMatrix:
    """Sparse matrix exact on columns of degree ``<= valid``.

    ``up``/``down`` bound how far the operator raises/lowers the degree.
    """

    mat: sp.csr_matrix
    valid: int
    up: int
    down: int

    def __matmul__(self, other: "FockMatrix") -> "FockMatrix":
        valid = min(other.valid, self.valid - other.up)
        return FockMatrix((self.mat @ other.mat).tocsr(), valid, self.up + other.up, self.down + other.down)

    def __add__(self, other: "FockMatrix") -> "FockMatrix":
        return FockMatrix((self.mat + other.mat).tocsr(), min(self.valid, other.valid),
                          max(self.up, other.up), max(self.down, other.down))

    def __sub__(self, other: "FockMatrix") -> "FockMatrix":
        return self + other.scale(-1)

    def scale(self, c: complex) -> "FockMatrix":
        return FockMatrix((self.mat * c).tocsr(), self.valid, self.up, self.down)

    def adjoint(self) -> "FockMatrix":
        return FockMatrix(self.mat.conj().T.tocsr(), self.valid - self.down, self.down, self.up)


class FockBasis:
    """States ``(alpha, beta)`` with ``|alpha| + |beta| <= D`` and the generator matrices."""

    def __init__(self, n: int, D: int):
        if n < 1 or D < 0:
            raise ValueError("need n >= 1 and D >= 0")
        self.n, self.D = n, D
        states = [s for s in itertools.product(range(D + 1), repeat=2 * n) if sum(s) <= D]
        states.sort(key=lambda s: (sum(s), s))
        self.states = states
        self.index = {s: i for i, s in enumerate(states)}
        self.degree = np.array([sum(s) for s in states])
        self.alpha_degree = np.array([sum(s[:n]) for s in states])
        self.dim = len(states)
        root = 2.0 * math.sqrt(math.pi)
        self._raise = [self._creation(k) * root for k in range(2 * n)]
        dm = self.dim
        self.identity = FockMatrix(sp.identity(dm, dtype=complex, format="csr"), D, 0, 0)
        proj = sp.diags((self.alpha_degree == 0).astype(complex)).tocsr()
        self.P = FockMatrix(proj, D, 0, 0)
        self.Pperp = FockMatrix((sp.identity(dm, dtype=complex) - proj).tocsr(), D, 0, 0)
        with np.errstate(divide="ignore"):
            inv = np.where(self.alpha_degree > 0, 1.0 / (4 * math.pi * np.maximum(self.alpha_degree, 1)), 0.0)
        self.Linv = FockMatrix(sp.diags(inv.astype(complex)).tocsr(), D, 0, 0)
        self.b = [FockMatrix(self._raise[j], D - 1, 1, 0) for j in range(n)]
        self.bplus = [FockMatrix(self._raise[j].conj().T.tocsr(), D, 0, 1) for j in range(n)]
        bt = [self._raise[n + j] for j in range(n)]
        tw = 2 * math.pi
        self.z = [FockMatrix(((bt[j] + self.bplus[j].mat) / tw).tocsr(), D - 1, 1, 1) for j in range(n)]
        self.zb = [FockMatrix(((self.b[j].mat + bt[j].conj().T) / tw).tocsr(), D - 1, 1, 1) for j in range(n)]

    def _creation(self, k: int) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for i, s in enumerate(self.states):
            if sum(s) + 1 > self.D:
                continue
            t = list(s)
            t[k] += 1
            rows.append(self.index[tuple(t)])
            cols.append(i)
            vals.append(math.sqrt(s[k] + 1))
        return sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(self.dim, self.dim))

    def var(self, kind: str, j: int) -> FockMatrix:
        if not 1 <= j <= self.n:
            raise ValueError(f"index {j} out of range 1..{self.n}")
        return {"z": self.z, "zb": self.zb}[kind][j - 1]

    def laplacian(self) -> FockMatrix:
        out = None
        for j in range(self.n):
            t = self.b[j] @ self.bplus[j]
            out = t if out is None else out + t
        return out


@lru_cache(maxsize=16)
def fock_basis(n: int, D: int) -> FockBasis:
    return FockBasis(n, D)


# -- normalization -----------------------------------------------------------

def state_norm_sq(alpha, beta) -> float:
    """||b^alpha z^beta exp(-pi|z|^2/2)||^2 = (4 pi)^|alpha| alpha! beta! / pi^|beta|."""
    out = (4 * math.pi) ** sum(alpha) / math.pi ** sum(beta)
    for a in alpha:
        out *= math.factorial(a)
    for b in beta:
        out *= math.factorial(b)
    return out


def _vacuum(basis: FockBasis) -> np.ndarray:
    v = np.zeros(basis.dim, dtype=complex)
    v[basis.index[(0,) * (2 * basis.n)]] = 1.0
    return v


def gram_matrix(basis: FockBasis, max_degree: int) -> np.ndarray:
    """Gram matrix of the normalized vectors b^alpha z^beta vac built with the generator matrices."""
    n = basis.n
    vac = _vacuum(basis)
    vecs = []
    for s in basis.states:
        if sum(s) > max_degree:
            continue
        alpha, beta = s[:n], s[n:]
        v = vac
        for j in range(n):
            for _ in range(beta[j]):
                v = basis.z[j].mat @ v
        for j in range(n):
            for _ in range(alpha[j]):
                v = basis.b[j].mat @ v
        vecs.append(v / math.sqrt(state_norm_sq(alpha, beta)))
    m = np.array(vecs).T
    return m.conj().T @ m


def quadrature_norm_sq(alpha: int, beta: int, points: int = 24) -> float:
    """||b^alpha z^beta vac||^2 at n = 1 by Gauss-Hermite quadrature on R^2."""
    # polynomial in (z, zbar) as {(p, q): coeff}; b(f e) = (-2 df/dz + 2 pi zbar f) e
    f = {(beta, 0): 1.0 + 0j}
    for _ in range(alpha):
        g: dict = {}
        for (p, q), c in f.items():
            if p:
                g[(p - 1, q)] = g.get((p - 1, q), 0) - 2 * p * c
            g[(p, q + 1)] = g.get((p, q + 1), 0) + 2 * math.pi * c
        f = g
    x, w = np.polynomial.hermite.hermgauss(points)
    u, v = np.meshgrid(x / math.sqrt(math.pi), x / math.sqrt(math.pi), indexing="ij")
    z = u + 1j * v
    val = sum(c * z**p * np.conj(z) ** q for (p, q), c in f.items())
    weight = np.outer(w, w) / math.pi
    return float(np.sum(weight * np.abs(val) ** 2))


def laplacian_spectrum(basis: FockBasis) -> np.ndarray:
    return np.linalg.eigvalsh(basis.laplacian().mat.toarray())


# -- matrices of kernels and expressions --------------------------------------

def _monomial_matrix(basis: FockBasis, factors) -> FockMatrix:
    out = basis.identity
    for kind, j in factors:
        out = basis.var(kind, j) @ out
    return out


def _poly_matrix(basis: FockBasis, poly: Poly, assign, env) -> FockMatrix:
    """Multiplication operator of a polynomial in tensors and unprimed variables."""
    out = None
    for mono, c in sorted(expand_concrete(poly, assign, env).items()):
        if any(k not in ("z", "zb") for k, _ in mono):
            raise ValueError("multiplication polynomials may only contain z and zb")
        t = _monomial_matrix(basis, mono).scale(c)
        out = t if out is None else out + t
    return out if out is not None else FockMatrix(sp.csr_matrix((basis.dim, basis.dim), dtype=complex), basis.D, 0, 0)


_PLAIN = {"zp": "z", "zbp": "zb"}


def kernel_matrix(poly: Poly, basis: FockBasis, assign, env=None) -> FockMatrix:
    """Operator of the kernel Q(Z, Z') P: sum of U(Z) o P o V(Z') over monomials."""
    env = dict(env or {})
    out = None
    for mono, c in sorted(expand_concrete(poly, assign, env).items()):
        if any(k in ("B", "BR") for k, _ in mono):
            raise ValueError("expand normal forms before building matrices")
        left = [(k, j) for k, j in mono if k in ("z", "zb")]
        right = [(_PLAIN[k], j) for k, j in mono if k in _PLAIN]
        t = (_monomial_matrix(basis, left) @ basis.P @ _monomial_matrix(basis, right)).scale(c)
        out = t if out is None else out + t
    if out is None:
        return FockMatrix(sp.csr_matrix((basis.dim, basis.dim), dtype=complex), basis.D, 0, 0)
    return out


def _index(label: str, env: dict) -> int:
    if is_concrete(label):
        return int(label)
    if label not in env:
        raise ValueError(f"free index {label!r} has no value")
    return env[label]


def matrix_of(x, basis: FockBasis, assign, env=None) -> FockMatrix:
    """Matrix of an operator expression (or a kernel polynomial)."""
    env = dict(env or {})
    if isinstance(x, Poly):
        return kernel_matrix(x, basis, assign, env)
    if isinstance(x, ex.LeafP):
        return basis.P
    if isinstance(x, ex.LeafI):
        return basis.identity
    if isinstance(x, ex.LeafKernel):
        return kernel_matrix(x.poly, basis, assign, env)
    if isinstance(x, ex.Compose):
        return matrix_of(x.left, basis, assign, env) @ matrix_of(x.right, basis, assign, env)
    if isinstance(x, ex.Sum):
        out = None
        for c in x.children:
            m = matrix_of(c, basis, assign, env)
            out = m if out is None else out + m
        return out
    if isinstance(x, ex.SumOver):
        out = None
        for values in itertools.product(range(1, basis.n + 1), repeat=len(x.labels)):
            m = matrix_of(x.child, basis, assign, {**env, **dict(zip(x.labels, values))})
            out = m if out is None else out + m
        return out
    child = matrix_of(x.child, basis, assign, env)
    if isinstance(x, ex.ApplyB):
        return basis.b[_index(x.label, env) - 1] @ child
    if isinstance(x, ex.ApplyBplus):
        return basis.bplus[_index(x.label, env) - 1] @ child
    if isinstance(x, ex.MultiplyVar):
        return basis.var(x.kind, _index(x.label, env)) @ child
    if isinstance(x, ex.Deriv):
        j = _index(x.label, env) - 1
        if x.kind == "z":
            op = (basis.zb[j].scale(math.pi) - basis.b[j]).scale(0.5)
        else:
            op = (basis.bplus[j] - basis.z[j].scale(math.pi)).scale(0.5)
        return op @ child
    if isinstance(x, ex.Scale):
        return _poly_matrix(basis, x.poly, assign, env) @ child
    if isinstance(x, ex.Project):
        return basis.P @ child
    if isinstance(x, ex.Offdiag):
        return basis.Pperp @ child
    if isinstance(x, ex.Inv):
        op = basis.Pperp
        for _ in range(x.power):
            op = basis.Linv @ op
        return op @ child
    if isinstance(x, ex.Adjoint):
        return child.adjoint()
    raise TypeError(f"no matrix for {type(x).__name__}")


# -- comparison -----------------------------------------------------------------

def compare(a: FockMatrix, b: FockMatrix, basis: FockBasis, min_valid: int = 0) -> float:
    """Max entry deviation over the jointly exact columns, relative to the larger magnitude."""
    if a.mat.shape != b.mat.shape or a.mat.shape[0] != basis.dim:
        raise ValueError("matrices live on different bases")
    valid = min(a.valid, b.valid)
    if valid < min_valid:
        raise BudgetError(
            f"exact block has degree {valid} < {min_valid}; raise the truncation D (now {basis.D})"
        )
    cols = np.flatnonzero(basis.degree <= valid)
    da = a.mat[:, cols].toarray()
    db = b.mat[:, cols].toarray()
    diff = float(np.max(np.abs(da - db), initial=0.0))
    scale = max(float(np.max(np.abs(da), initial=0.0)), float(np.max(np.abs(db), initial=0.0)))
    return diff / scale if scale > 0 else diff


def residual_report(a: FockMatrix, b: FockMatrix, basis: FockBasis, seed: int, min_valid: int = 0) -> dict:
    return {
        "n": basis.n,
        "D": basis.D,
        "seed": seed,
        "valid_degree": min(a.valid, b.valid),
        "residual": compare(a, b, basis, min_valid),
    }
