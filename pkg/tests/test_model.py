"""Model kernels: first-order kernel, the six second-order terms, and their diagonal data."""

import numpy as np
import pytest

from bergman_model import kernel as kc
from bergman_model import model
from bergman_model.dsl import parse_poly
from bergman_model.sampler import sample_admissible
from bergman_model.tensor import Poly, numeric_eval

RQ = ("r", "q")
# J below is the rescaled gradient tensor, so no powers of 2 pi i appear in the tables
J_SYM = "(* (J j i r) (+ (J i~ j~ q~) (J j~ i~ q~)))"


def k(text):
    return parse_poly(text)


def gap(a: Poly, b: Poly, n: int, seed: int) -> float:
    assign = sample_admissible(n, seed)
    d = numeric_eval(a - b, assign, free=RQ)
    scale = max(np.max(np.abs(numeric_eval(b, assign, free=RQ))), 1.0)
    return float(np.max(np.abs(d)) / scale)


def test_first_order_adjoint_kernel():
    want = k("(* 1/3 I pi (J j l m) (+ (* (zp j) (z l) (zp m)) (* (z j) (z l) (zp m))))")
    assert kc.adjoint(model.kernel_of("A")) == want


@pytest.mark.parametrize("name", ["A", "F1"])
def test_first_order_kernels_are_cubic(name):
    K = model.kernel_of(name)
    assert {sum(f[0] == "v" for f in t) for t, _ in K.items()} == {3}


def test_first_order_kernel_is_minus_both_halves():
    A = model.kernel_of("A")
    assert model.kernel_of("F1") == -(A + kc.adjoint(A))


def test_first_order_kernel_vanishes_on_diagonal():
    F1 = model.kernel_of("F1")
    assert kc.eval_origin(F1).is_zero()
    assert kc.diagonal_two_form(F1).is_zero()


def test_first_term_table():
    tf = kc.diagonal_two_form(model.kernel_of("I1"))
    assert tf.mixed == k(f"(* -2/9 {J_SYM})")
    assert tf.holo.is_zero() and tf.antiholo.is_zero()


@pytest.mark.parametrize("name", ["I5", "I6"])
def test_composite_term_tables(name):
    assert kc.diagonal_two_form(model.kernel_of(name)).mixed == k(f"(* -1/9 {J_SYM})")


def test_adjoint_terms_share_tables():
    for a, b in (("I1", "I3"), ("I2", "I4")):
        assert kc.diagonal_two_form(model.kernel_of(a)) == kc.diagonal_two_form(model.kernel_of(b))


def test_second_order_operator_decomposes():
    parts = [model.kernel_of(f"I2{j}") for j in range(1, 7)]
    assert model.kernel_of("I2") == -sum(parts, Poly())


def test_last_piece_is_untracked():
    K = model.kernel_of("I27")
    assert kc.restrict(K, "approx").is_zero()
    assert kc.diagonal_two_form(K).is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_term_26_table(n):
    # (i/8)|grad J|^2 omega - (2/3) J_ijr (5 J_{i~j~q~} - 4 J_{j~i~q~}) dz_r ^ dzbar_q
    want = k("(+ (* -1 (J a b c) (J a~ b~ c~) (delta r q))"
             " (* -2/3 (J i j r) (- (* 5 (J i~ j~ q~)) (* 4 (J j~ i~ q~)))))")
    got = kc.diagonal_two_form(model.kernel_of("I26")).mixed
    assert gap(got, want, n, 3) <= 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_term_25_gradient_coefficient(n):
    # -1/96 against 2i omega puts +1/96 |grad J|^2 on the diagonal
    want = k("(+ (* (delta r q) (- (* 1/6 (J a b c) (J a~ b~ c~)) (* 1/3 (R i j~ j i~))))"
             " (* 1/3 (- (R i r i~ q~) (R r i~ i q~))))")
    got = kc.diagonal_two_form(model.kernel_of("I25")).mixed
    assert gap(got, want, n, 5) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("seed", range(5))
def test_second_order_two_form_is_b1_omega(n, seed):
    tf = kc.diagonal_two_form(model.kernel_of("F2"))
    assert gap(tf.mixed, k("(* (R j i~ i j~) (delta r q))"), n, seed) <= 1e-9
    assert tf.holo.is_zero() and tf.antiholo.is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_second_order_diagonal_value_is_b1(n):
    val = kc.eval_origin(model.kernel_of("F2"))
    b1 = model.b1_poly()
    for seed in range(5):
        a = sample_admissible(n, seed)
        assert abs(complex(numeric_eval(val - b1, a))) <= 1e-9 * max(1.0, abs(complex(numeric_eval(b1, a))))


def test_catalog_names():
    assert set(model.KERNEL_NAMES) <= set(model.catalog())


def test_fast_and_direct_routes_agree():
    for name in ("I3", "I5"):
        assert model.direct_route(name) == model.kernel_of(name)


def test_expected_tables_cover_all_terms():
    want = {"I1", "I2", "I3", "I4", "I5", "I6", "I21", "I22", "I23", "I24", "I25", "I26", "F1", "F2"}
    assert want <= set(model.expected_two_forms())
