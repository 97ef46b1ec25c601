"""Random admissible numeric values for the tensor families.

Every family is stored as one complex array over the complex frame
``(d/dz_1..d/dz_n, d/dzbar_1..d/dzbar_n)``; axis positions ``0..n-1`` are
unbarred slots and ``n..2n-1`` barred ones.  All families are components of
real tensors, so flipping every bar conjugates a component.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NumericAssignment",
    "SamplingError",
    "sample_admissible",
    "resample_family",
    "cyclic_residual",
    "contracted_constraint_residual",
    "frame_matrix",
]


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class NumericAssignment:
    n: int
    seed: int
    arrays: dict = field(default_factory=dict)

    def component(self, family: str, bars: tuple[bool, ...]) -> np.ndarray:
        """Sub-array of ``family`` for the given bar pattern (shape ``(n,)*k``)."""
        full = self.arrays[family]
        if not bars:
            return np.asarray(full)
        n = self.n
        sl = tuple(slice(n, 2 * n) if b else slice(0, n) for b in bars)
        return full[sl]

    def to_json(self) -> str:
        enc = {
            k: {"re": np.real(v).tolist(), "im": np.imag(v).tolist()} for k, v in sorted(self.arrays.items())
        }
        return json.dumps({"n": self.n, "seed": self.seed, "arrays": enc}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NumericAssignment":
        data = json.loads(text)
        arrays = {k: np.asarray(v["re"]) + 1j * np.asarray(v["im"]) for k, v in data["arrays"].items()}
        return cls(data["n"], data["seed"], arrays)


def frame_matrix(n: int) -> np.ndarray:
    """Columns: complex frame vectors in the real basis e_1..e_2n."""
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    for j in range(n):
        m[2 * j, j] = 0.5
        m[2 * j + 1, j] = -0.5j
        m[2 * j, n + j] = 0.5
        m[2 * j + 1, n + j] = 0.5j
    return m


def _random_curvature(rng: np.random.Generator, dim: int) -> np.ndarray:
    """A random real algebraic curvature tensor on R^dim."""
    t = rng.standard_normal((dim,) * 4)
    t = t - t.transpose(1, 0, 2, 3)
    t = t - t.transpose(0, 1, 3, 2)
    t = t + t.transpose(2, 3, 0, 1)
    bianchi = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return t - bianchi / 3.0


def _complexify(real4: np.ndarray, m: np.ndarray) -> np.ndarray:
    return np.einsum("abcd,aA,bB,cC,dD->ABCD", real4, m, m, m, m, optimize=True)


def _random_nabla_j(rng: np.random.Generator, n: int) -> np.ndarray:
    t = rng.standard_normal((n,) * 3) + 1j * rng.standard_normal((n,) * 3)
    t = (t - t.transpose(0, 2, 1)) / 2
    cyc = t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1)
    return t - cyc / 3.0


def cyclic_residual(assign: NumericAssignment) -> float:
    j = assign.component("J", (False,) * 3)
    anti = np.max(np.abs(j + j.transpose(0, 2, 1)), initial=0.0)
    cyc = np.max(np.abs(j + j.transpose(1, 2, 0) + j.transpose(2, 0, 1)), initial=0.0)
    return float(max(anti, cyc))


def _contracted_lhs(rc: np.ndarray, n: int) -> np.ndarray:
    # sum_j R(dz_j, dz_r, dzbar_j, dzbar_q)
    return np.einsum("jrjq->rq", rc[:n, :n, n:, n:])


def _contracted_rhs(jc: np.ndarray) -> np.ndarray:
    # (1/2) sum_{j,i} J_{jri} conj(J_{jqi})
    return 0.5 * np.einsum("jri,jqi->rq", jc, np.conj(jc))


def contracted_constraint_residual(assign: NumericAssignment) -> float:
    n = assign.n
    lhs = _contracted_lhs(assign.arrays["R"], n)
    rhs = _contracted_rhs(assign.component("J", (False,) * 3))
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def sample_admissible(n: int, seed: int) -> NumericAssignment:
    """Sample all families subject to the symmetry and contraction constraints."""
    if n not in (1, 2, 3, 4):
        raise ValueError("n must be in 1..4")
    rng = np.random.default_rng([int(seed), n])
    dim = 2 * n
    m = frame_matrix(n)

    jc = _random_nabla_j(rng, n)
    jfull = np.zeros((dim,) * 3, dtype=complex)
    jfull[:n, :n, :n] = jc
    jfull[n:, n:, n:] = np.conj(jc)

    real_r = _random_curvature(rng, dim)
    target = _contracted_rhs(jc)
    basis = [_random_curvature(rng, dim) for _ in range(2 * n * n + 2)]
    cols = [_contracted_lhs(_complexify(b, m), n).ravel() for b in basis]
    a = np.array(cols).T
    gap = (target - _contracted_lhs(_complexify(real_r, m), n)).ravel()
    a_real = np.vstack([a.real, a.imag])
    g_real = np.concatenate([gap.real, gap.imag])
    coef, *_ = np.linalg.lstsq(a_real, g_real, rcond=None)
    real_r = real_r + np.tensordot(coef, np.array(basis), axes=1)
    rc = _complexify(real_r, m)

    ddj = rng.standard_normal((n,) * 4) + 1j * rng.standard_normal((n,) * 4)
    ddj_full = np.zeros((dim,) * 4, dtype=complex)
    ddj_full[n:, n:, n:, n:] = ddj
    ddj_full[:n, :n, :n, :n] = np.conj(ddj)

    phi = np.asarray(complex(rng.standard_normal()))

    out = NumericAssignment(n, int(seed), {"J": jfull, "R": rc, "DDJ": ddj_full, "Phi": phi})
    res = max(cyclic_residual(out), contracted_constraint_residual(out))
    if res > 1e-12:
        raise SamplingError(f"constraint residual {res:.3e} exceeds 1e-12 (n={n}, seed={seed})")
    return out


def resample_family(assign: NumericAssignment, family: str, seed: int) -> NumericAssignment:
    """Replace one unconstrained family (``DDJ`` or ``Phi``) by fresh values."""
    rng = np.random.default_rng([int(seed), assign.n, 7])
    n, dim = assign.n, 2 * assign.n
    arrays = dict(assign.arrays)
    if family == "DDJ":
        d = rng.standard_normal((n,) * 4) + 1j * rng.standard_normal((n,) * 4)
        full = np.zeros((dim,) * 4, dtype=complex)
        full[n:, n:, n:, n:] = d
        full[:n, :n, :n, :n] = np.conj(d)
        arrays["DDJ"] = full
    elif family == "Phi":
        arrays["Phi"] = np.asarray(complex(rng.standard_normal()))
    else:
        raise ValueError(f"family {family!r} is constrained and cannot be resampled alone")
    return NumericAssignment(assign.n, assign.seed, arrays)
