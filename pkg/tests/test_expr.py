"""Operator expression trees and their symbolic evaluation."""

import pytest

from bergman_model import expr as ex
from bergman_model import kernel as kc
from bergman_model.dsl import DslError, parse, parse_poly


def ev(text, free=()):
    return ex.evaluate(parse(text, free=free))


def test_open_and_closed_expressions():
    assert ex.is_open(parse("(b 1 I)"))
    assert not ex.is_open(parse("(b 1 P)"))
    with pytest.raises(ex.ExprError):
        ex.is_open(ex.Sum((ex.LeafI(), ex.LeafP())))


def test_substitute_leaf_fills_input_slot():
    op = parse("(inv 1 (offdiag (b 1 I)))")
    assert ex.substitute_leaf(op, ex.LeafP()) == parse("(inv 1 (offdiag (b 1 P)))")


def test_open_left_factor_acts_on_right_kernel():
    assert ev("(compose (b 1 I) (mul z 2 P))") == ev("(b 1 (mul z 2 P))")


def test_open_right_factor_acts_from_the_right():
    # P o b_1^+ is the adjoint of b_1 o P
    assert ev("(compose P (adjoint (b 1 I)))") == kc.adjoint(ev("(b 1 P)"))


def test_derivatives_of_the_gaussian():
    # P = exp(-pi/2 (|z|^2 + |z'|^2 - 2 z.zbar'))
    assert ev("(d zb 1 P)") == parse_poly("(* -1/2 pi (z 1))")
    assert ev("(d z 1 P)") == parse_poly("(* pi (- (zbp 1) (* 1/2 (zb 1))))")


def test_scale_rejects_primed_variables():
    with pytest.raises(DslError):
        parse("(scale (zp 1) P)")
    with pytest.raises(ex.ExprError):
        ex.evaluate(ex.Scale(parse_poly("(zp 1)"), ex.LeafP()))


def test_identity_alone_has_no_kernel():
    with pytest.raises(ex.ExprError):
        ex.evaluate(ex.LeafI())


def test_sum_and_sumover():
    assert ev("(sum P P)") == kc.P.scale(2)
    assert ev("(sumover (j) (scale (delta j j) P))") == ev("(scale n P)")


def test_adjoint_of_expression():
    assert ev("(adjoint (b 1 P))") == kc.adjoint(ev("(b 1 P)"))
