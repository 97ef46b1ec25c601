"""Kernel calculus: generators, normal forms, projections, adjoints, composition."""

import numpy as np
import pytest

from bergman_model import expr as ex
from bergman_model import kernel as kc
from bergman_model.checks import random_kernel
from bergman_model.dsl import parse, parse_poly
from bergman_model.scalar import ExactScalar
from bergman_model.tensor import Poly


def ev(text, free=()):
    return ex.evaluate(parse(text, free=free))


def k(text):
    return parse_poly(text)


JS = ("j", "s")


def test_bplus_kills_projector():
    assert ev("(bplus 1 P)").is_zero()
    assert ev("(bplus j P)", free=("j",)).is_zero()


def test_b_on_projector():
    assert ev("(b j P)", free=("j",)) == k("(* 2 pi (- (zb j) (zbp j)))")


def test_b_on_linear_kernel():
    want = k("(+ (* -2 (delta j s)) (* 2 pi (z s) (- (zb j) (zbp j))))")
    assert ev("(b j (mul z s P))", free=JS) == want


def test_mixed_quadratic_normal_form():
    # z_s zbar_t P = (1/2pi) b_t z_s P + (1/pi) delta_st P + z_s zbar'_t P
    rhs = ev("(sum (b t (kernel (* 1/2 (^ pi -1) (z s))))"
             " (kernel (* (^ pi -1) (delta s t)))"
             " (kernel (* (z s) (zbp t))))", free=("s", "t"))
    lhs = k("(* (z s) (zb t))")
    assert rhs == lhs
    nf = kc.left_normal_form(lhs)
    assert max(kc.word_length(t) for t, _ in nf.items()) == 1
    assert kc.expand_left(nf) == lhs


def test_quartic_normal_form_has_words_up_to_length_two():
    K = k("(* (zb s) (zb t) (z j) (z l))")
    nf = kc.left_normal_form(K)
    assert sorted({kc.word_length(t) for t, _ in nf.items()}) == [0, 1, 2]
    assert kc.expand_left(nf) == K


@pytest.mark.parametrize("text,kept", [
    ("(kernel (* (z 1) (z 2)))", True),
    ("(b 1 (mul z 1 P))", False),
    ("(b 1 (b 2 P))", False),
])
def test_projection_on_words(text, kept):
    K = ev(text)
    assert kc.project_ker(K) == (K if kept else Poly())


def test_inverse_on_first_order_word():
    lhs = ev("(inv 1 (offdiag (b j (mul z s P))))", free=JS)
    assert lhs == ev("(b j (mul z s P))", free=JS).scale(ExactScalar.const(1, pi=-1) / 4)


def test_inverse_on_antiholomorphic_word():
    want = k("(+ (* 1/4 (- (zb j) (zbp j)) (- (zb s) (zbp s))) (* 1/2 (zbp s) (- (zb j) (zbp j))))")
    assert ev("(inv 1 (offdiag (b j (mul zb s P))))", free=JS) == want


def test_adjoint_of_projector_and_involution():
    assert kc.adjoint(kc.P) == kc.P
    K = k("(+ (* (+ 1 I) (z 1) (zbp 2)) (* pi (J a b c) (z a) (zp b) (zp c)))")
    assert kc.adjoint(kc.adjoint(K)) == K


def test_adjoint_swaps_and_conjugates():
    # K*(Z, Z') = conj K(Z', Z)
    assert kc.adjoint(k("(* I (z 1) (zbp 2))")) == k("(* (- I) (zbp 1) (z 2))")


def test_compose_projector_is_idempotent():
    assert kc.compose(kc.P, kc.P) == kc.P


def test_projector_against_quartic_at_origin():
    K = ev("(compose P (kernel (* (zb s) (zb t) (z j) (z l))))", free=("s", "t", "j", "l"))
    want = k("(* (^ pi -2) (+ (* (delta j t) (delta l s)) (* (delta j s) (delta l t))))")
    assert kc.eval_origin(K) == want


def test_complementary_projection_of_mixed_quadratic():
    want = k("(+ (* -1 (^ pi -1) (delta j l)) (* (z j) (- (zb l) (zbp l))))")
    assert ev("(offdiag (kernel (* (z j) (zb l))))", free=("j", "l")) == want


def test_eval_origin_examples():
    assert kc.eval_origin(kc.P) == Poly.const(1)
    assert kc.eval_origin(k("(* (z s) (zbp t))")).is_zero()


def test_two_form_of_projector_is_pi_delta():
    # (i/2pi) d_x d_y P(0,0) = omega = (i/2) sum dz_j ^ dzbar_j
    tf = kc.diagonal_two_form(kc.P)
    assert tf.mixed == k("(* pi (delta r q))")
    assert tf.holo.is_zero() and tf.antiholo.is_zero()


def test_two_form_of_double_b_word_vanishes():
    assert kc.diagonal_two_form(ev("(b i (b j P))", free=("i", "j"))).is_zero()


def test_two_form_of_inverse_antiholomorphic_word():
    tf = kc.diagonal_two_form(ev("(inv 1 (offdiag (b j (mul zb s P))))", free=JS))
    # (1/2) dzbar_j ^ dzbar_s, shown as its antisymmetric table
    assert tf.antiholo == k("(* 1/4 (- (* (delta j r) (delta s q)) (* (delta j q) (delta s r))))")
    assert tf.mixed.is_zero() and tf.holo.is_zero()


def test_right_normal_form_roundtrip():
    K = k("(* (zp 1) (zbp 1) (z 2) (zb 1))")
    assert kc.expand_right(kc.right_normal_form(K)) == K


def test_laplacian_inverse_scales_by_word_length():
    K = ev("(b 1 (b 2 P))")
    assert kc.apply_inv_offdiag(K, 1) == K.scale(ExactScalar.const(1, pi=-1) / 8)
    assert kc.apply_inv_offdiag(K, 2) == K.scale(ExactScalar.const(1, pi=-2) / 64)


@pytest.mark.parametrize("seed", range(5))
def test_random_kernel_identities(seed):
    rng = np.random.default_rng(seed)
    for _ in range(10):
        a, b = random_kernel(rng, 2), random_kernel(rng, 2)
        assert kc.adjoint(kc.compose(a, b)) == kc.compose(kc.adjoint(b), kc.adjoint(a))
        assert kc.project_ker(kc.project_ker(a)) == kc.project_ker(a)
        assert kc.offdiag(a) + kc.expand_left(kc.project_ker(a)) == a
        assert kc.left_normal_form(a, last=True) == kc.left_normal_form(a)


def test_restrict_relations():
    K = k("(+ 3 (z 1) (* (z 1) (zb 2)) (* (z 1) (zp 2)) (* (zp 1) (zbp 2)))")
    assert kc.restrict(K, "approx") == k("(+ 3 (z 1) (* (z 1) (zp 2)))")
    assert kc.restrict(K, "sim") == k("(+ 3 (z 1) (* (z 1) (zb 2)) (* (z 1) (zp 2)))")
    with pytest.raises(ValueError):
        kc.restrict(K, "close")
