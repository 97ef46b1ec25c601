"""Indexed tensor polynomials, canonical forms, and the admissible sampler."""

import numpy as np
import pytest

from bergman_model.dsl import parse_poly
from bergman_model.sampler import (
    NumericAssignment,
    contracted_constraint_residual,
    cyclic_residual,
    resample_family,
    sample_admissible,
)
from bergman_model.scalar import I, N
from bergman_model.tensor import Poly, delta, numeric_eval, tensor, var


def p(text):
    return parse_poly(text)


def test_delta_contracts_into_variable():
    assert p("(* (delta i j) (z i))") == p("(z j)")


def test_delta_trace_is_n():
    assert p("(delta i i)") == Poly.const(N)


def test_delta_against_antisymmetric_pair_vanishes():
    # J is antisymmetric in its last two slots, so contracting them with a delta kills it
    assert p("(* (J s t i) (delta i j) (delta k t) (z s) (delta j k))").is_zero()


def test_gradient_tensor_antisymmetry():
    assert p("(J s i t)") == -p("(J s t i)")
    assert p("(J s i i)").is_zero()


def test_dummy_renaming_gives_one_normal_form():
    assert p("(* (J a i b) (z a) (zb b))") == p("(* (J c i d) (z c) (zb d))")


def test_curvature_slot_swap_flips_sign():
    assert p("(R b a c d)") == -p("(R a b c d)")
    assert p("(R a b d c)") == -p("(R a b c d)")


def test_curvature_pair_symmetry():
    assert p("(R a b c~ d~)") == p("(R c~ d~ a b)")


def test_mixed_type_gradient_tensor_is_zero():
    assert p("(J a b~ c)").is_zero()
    assert p("(J a~ b c~)").is_zero()


def test_conjugation_swaps_bars():
    assert p("(J j i r)").conjugate() == p("(J j~ i~ r~)")
    assert p("(* I (delta j k))").conjugate() == p("(* (- I) (delta j k))")


def test_conjugation_is_an_involution():
    x = p("(+ (* (+ 1 I) pi (J a b c) (R a b c~ d~)) (* 2 (z d) (zbp d)))")
    assert x.conjugate().conjugate() == x


def test_canonicalize_is_idempotent():
    x = p("(* (J a b c) (J a~ b~ c~) (z q))")
    assert Poly.from_terms(x.items()) == x


def test_free_labels():
    assert p("(* (J a i b) (z a) (zb b))").free_labels() == {"i"}


@pytest.mark.parametrize("seed", range(5))
def test_sampler_constraints_n2(seed):
    a = sample_admissible(2, seed)
    assert cyclic_residual(a) <= 1e-12
    assert contracted_constraint_residual(a) <= 1e-12


def test_sampler_n1_gradient_vanishes():
    a = sample_admissible(1, 0)
    assert np.max(np.abs(a.arrays["J"])) == 0.0


def test_sampler_is_deterministic():
    a, b = sample_admissible(3, 11), sample_admissible(3, 11)
    for k in a.arrays:
        assert np.array_equal(a.arrays[k], b.arrays[k])


def test_assignment_json_roundtrip():
    a = sample_admissible(2, 5)
    b = NumericAssignment.from_json(a.to_json())
    for k in a.arrays:
        assert np.allclose(a.arrays[k], b.arrays[k], rtol=0, atol=1e-15)


def test_resample_keeps_constrained_families():
    a = sample_admissible(2, 1)
    b = resample_family(a, "DDJ", 9)
    assert np.array_equal(a.arrays["J"], b.arrays["J"])
    assert not np.array_equal(a.arrays["DDJ"], b.arrays["DDJ"])


@pytest.mark.parametrize("n", [2, 3])
def test_numeric_cyclic_sum_vanishes(n):
    a = sample_admissible(n, 4)
    val = numeric_eval(p("(+ (J j i r) (J i r j) (J r j i))"), a, free=("j", "i", "r"))
    assert np.max(np.abs(val)) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_numeric_contracted_curvature_identity(n):
    a = sample_admissible(n, 8)
    val = numeric_eval(p("(- (R j r j~ q~) (* 1/2 (J j r i) (J j~ q~ i~)))"), a, free=("r", "q"))
    assert np.max(np.abs(val)) <= 1e-10


def test_numeric_eval_respects_canonicalization():
    # build an unsorted term by hand and compare with its canonical form numerically
    rng = np.random.default_rng(0)
    a = sample_admissible(2, 2)
    for _ in range(20):
        s, t, u = (str(int(x)) for x in rng.integers(1, 3, size=3))
        raw = Poly.term([tensor("J", (s, False), (t, False), (u, False)),
                         tensor("R", (t, False), (s, False), (u, True), (s, True))])
        swapped = Poly.term([tensor("R", (u, True), (s, True), (t, False), (s, False)),
                             tensor("J", (s, False), (u, False), (t, False))])
        assert np.allclose(numeric_eval(raw, a), numeric_eval(-swapped, a), atol=1e-12)


def test_numeric_eval_rejects_variables():
    with pytest.raises(ValueError):
        numeric_eval(Poly.term([var("z", "1")]), sample_admissible(1, 0))


def test_delta_contracts_only_when_summed():
    k = Poly.term([delta("a", "b"), var("z", "a")])
    assert k != Poly.term([var("z", "b")])
    assert k.sum_over("a") == Poly.term([var("z", "b")])


def test_disjoint_pieces_canonicalize_independently():
    # eight interchangeable z zbar' pairs would be 8! orders for a brute-force search
    pairs = "".join(f" (z #{k}) (zbp #{k})" for k in range(8))
    a = p(f"(*{pairs})")
    shuffled = "".join(f" (zbp #{k}) (z #{k})" for k in (3, 1, 7, 0, 6, 2, 5, 4))
    assert p(f"(*{shuffled})") == a
    assert len(a) == 1


def test_sign_from_each_piece_multiplies():
    x = p("(* (J a b c) (z a) (z b) (zb c) (J d e f) (zb d) (zp e) (zp f))")
    y = p("(* (J a c b) (z a) (z b) (zb c) (J d f e) (zb d) (zp e) (zp f))")
    assert x == y
    assert p("(* (J a b c) (z a) (zb b) (zb c))").is_zero()
