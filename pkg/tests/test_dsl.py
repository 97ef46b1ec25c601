"""S-expression parser and renderer."""

import pytest

from bergman_model import expr as ex
from bergman_model import kernel as kc
from bergman_model import model
from bergman_model.dsl import DslError, parse, parse_poly, render
from bergman_model.render import render_poly_dsl, render_poly_math


def test_b_on_projector():
    assert parse("(b 1 P)") == ex.ApplyB("1", ex.LeafP())


def test_inverse_expression_shape():
    e = parse("(inv 1 (offdiag (b 1 (mul z 1 P))))")
    assert e == ex.Inv(1, ex.Offdiag(ex.ApplyB("1", ex.MultiplyVar("z", "1", ex.LeafP()))))


def test_compose_projectors_evaluates_to_projector():
    e = parse("(compose P P)")
    assert e == ex.Compose(ex.LeafP(), ex.LeafP())
    assert ex.evaluate(e) == kc.P


def test_repeated_name_is_summed():
    e = parse("(b j (mul z j P))")
    assert isinstance(e, ex.SumOver) and e.labels == ("j",)
    assert parse("(b j (mul z j P))", free=("j",)) == ex.ApplyB("j", ex.MultiplyVar("z", "j", ex.LeafP()))


def test_comments_and_whitespace():
    assert parse("; leading comment\n(b 1\n   P) ; trailing") == parse("(b 1 P)")


@pytest.mark.parametrize("text,pos,msg", [
    ("(frob 1 P)", (1, 1), "unknown form"),
    ("(b 1)", (1, 1), "b"),
    ("(b 1 P", (1, 1), "unbalanced"),
    ("(b 1 P))", (1, 8), "unbalanced"),
    ("\n  (inv 1 (offdiag))", (2, 10), "offdiag"),
])
def test_errors_carry_positions(text, pos, msg):
    with pytest.raises(DslError) as info:
        parse(text)
    assert (info.value.line, info.value.col) == pos
    assert msg in str(info.value)


@pytest.mark.parametrize("name", model.KERNEL_NAMES)
def test_parse_render_roundtrip_on_pipeline(name):
    e = model.defining_expr(name)
    assert parse(render(e), free=("r", "q")) == e


def test_poly_render_roundtrip():
    texts = [
        "(+ (* (+ 1/2 (* -3 I)) (^ pi -2) (J a b c) (R a~ b~ c~ d~) (z d)) (* n (zbp 1)))",
        "(* (delta r q) (DDJ a~ b~ c~ d~) (Phi))",
        "0",
        "(* -1 I)",
    ]
    for t in texts:
        p = parse_poly(t)
        assert parse_poly(render_poly_dsl(p)) == p


def test_math_rendering_is_readable():
    assert render_poly_math(parse_poly("(* 2 (z 1))")) == "(2+0i) z[1]"
    assert render_poly_math(parse_poly("0")) == "0"
