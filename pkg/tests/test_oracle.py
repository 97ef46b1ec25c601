"""Matrix oracle on the truncated oscillator basis."""

import math

import numpy as np
import pytest

from bergman_model import expr as ex
from bergman_model import kernel as kc
from bergman_model import model
from bergman_model import oracle as orc
from bergman_model.checks import random_kernel
from bergman_model.dsl import parse, parse_poly
from bergman_model.sampler import sample_admissible


def assign(n, seed=0):
    return sample_admissible(n, seed)


@pytest.mark.parametrize("n,D", [(1, 10), (2, 8)])
def test_laplacian_spectrum_is_4pi_times_integers(n, D):
    ev = orc.laplacian_spectrum(orc.fock_basis(n, D))
    k = np.round(ev / (4 * math.pi))
    assert np.max(np.abs(ev - 4 * math.pi * k)) <= 1e-8
    assert set(k.astype(int)) == set(range(D + 1))


@pytest.mark.parametrize("n,D", [(1, 10), (2, 6)])
def test_normalized_states_are_orthonormal(n, D):
    g = orc.gram_matrix(orc.fock_basis(n, D), D)
    assert np.max(np.abs(g - np.eye(len(g)))) <= 1e-10


@pytest.mark.parametrize("alpha,beta", [(0, 0), (1, 0), (0, 2), (2, 1), (3, 2)])
def test_norm_formula_against_quadrature(alpha, beta):
    exact = orc.state_norm_sq((alpha,), (beta,))
    assert orc.quadrature_norm_sq(alpha, beta) == pytest.approx(exact, rel=1e-10)


def test_ladder_commutator():
    basis = orc.fock_basis(1, 8)
    b, bp = basis.b[0], basis.bplus[0]
    comm = (b @ bp - bp @ b).mat.toarray()
    interior = np.flatnonzero(basis.degree <= basis.D - 1)
    block = comm[np.ix_(interior, interior)] + 4 * math.pi * np.eye(len(interior))
    assert np.max(np.abs(block)) <= 1e-10


def test_projector_is_idempotent():
    basis = orc.fock_basis(2, 6)
    a = orc.matrix_of(ex.LeafP(), basis, assign(2))
    b = orc.matrix_of(ex.Compose(ex.LeafP(), ex.LeafP()), basis, assign(2))
    assert orc.compare(a, b, basis) == 0.0


def test_quartic_kernel_vacuum_entry():
    # <e0, P (zb zb z z P) e0> = 2 / pi^2 at n = 1
    basis = orc.fock_basis(1, 10)
    K = parse_poly("(* (zb 1) (zb 1) (z 1) (z 1))")
    m = orc.matrix_of(ex.Compose(ex.LeafP(), ex.LeafKernel(K)), basis, assign(1)).mat
    e0 = basis.index[(0, 0)]
    assert m[e0, e0] == pytest.approx(2 / math.pi**2, rel=1e-12)


def test_inverse_on_first_order_word_matches_scaling():
    basis = orc.fock_basis(1, 10)
    a = orc.matrix_of(parse("(inv 1 (offdiag (b 1 (mul z 1 P))))"), basis, assign(1))
    b = orc.matrix_of(parse("(b 1 (mul z 1 P))"), basis, assign(1)).scale(1 / (4 * math.pi))
    assert orc.compare(a, b, basis) <= 1e-12


@pytest.mark.parametrize("n,D", [(1, 12), (2, 10)])
def test_composite_term_kernel_matches_word(n, D):
    basis = orc.fock_basis(n, D)
    a = assign(n, 1)
    sym = orc.matrix_of(model.kernel_of("I5"), basis, a)
    word = orc.matrix_of(model.defining_expr("I5"), basis, a)
    assert orc.compare(sym, word, basis, min_valid=1) <= 1e-9


def test_adjoint_kernel_is_conjugate_transpose():
    basis = orc.fock_basis(2, 8)
    a = assign(2, 2)
    K = model.kernel_of("A")
    lhs = orc.matrix_of(kc.adjoint(K), basis, a)
    rhs = orc.matrix_of(K, basis, a).adjoint()
    assert orc.compare(lhs, rhs, basis) <= 1e-10


@pytest.mark.parametrize("seed", range(3))
def test_normal_form_roundtrip_matrix(seed):
    rng = np.random.default_rng(seed)
    basis = orc.fock_basis(2, 8)
    for _ in range(5):
        K = random_kernel(rng, 2)
        back = kc.expand_left(kc.left_normal_form(K))
        res = orc.compare(orc.matrix_of(K, basis, assign(2)), orc.matrix_of(back, basis, assign(2)), basis)
        assert res <= 1e-10


def test_compare_refuses_inexact_block():
    basis = orc.fock_basis(1, 2)
    K = parse_poly("(* (zb 1) (zb 1) (zb 1) (z 1) (z 1) (z 1))")
    m = orc.matrix_of(K, basis, assign(1))
    with pytest.raises(orc.BudgetError):
        orc.compare(m, m, basis, min_valid=1)


def test_residual_report_fields():
    basis = orc.fock_basis(1, 6)
    m = orc.matrix_of(ex.LeafP(), basis, assign(1))
    rep = orc.residual_report(m, m, basis, seed=0)
    assert rep["residual"] == 0.0 and rep["D"] == 6 and rep["valid_degree"] == 6


def test_basis_rejects_bad_sizes():
    with pytest.raises(ValueError):
        orc.FockBasis(0, 3)
