"""Exact scalars: Gaussian rationals times powers of pi and n."""

from fractions import Fraction

import math

import pytest

from bergman_model.scalar import I, N, ONE, PI, ZERO, ExactScalar, as_scalar


def test_exponent_cancellation():
    a = ExactScalar.const(Fraction(1, 2), pi=1)
    b = ExactScalar.const(2, pi=-1)
    assert a * b == ONE


def test_conjugation_fixes_pi_and_negates_imaginary_part():
    x = ExactScalar.const(0, Fraction(1, 3), pi=1)
    assert x.conj() == ExactScalar.const(0, Fraction(-1, 3), pi=1)
    assert (N * PI).conj() == N * PI


def test_additive_inverse_leaves_no_terms():
    s = ExactScalar.const(2, 3) + ExactScalar.const(-2, -3)
    assert s.is_zero()
    assert s.terms == {}
    assert s == ZERO


def test_i_squared_is_minus_one():
    assert I * I == -ONE


def test_inverse_of_monomial():
    x = ExactScalar.const(3, 4, pi=-2)
    assert x * x.inverse() == ONE
    assert ONE / x == x.inverse()


def test_negative_powers_of_n_are_rejected():
    with pytest.raises(ValueError):
        ExactScalar.const(1, n=-1)


def test_inverse_of_sum_is_rejected():
    with pytest.raises((ValueError, ZeroDivisionError, ArithmeticError)):
        (ONE + PI).inverse()


def test_evaluate_matches_floats():
    x = ExactScalar.const(Fraction(1, 4), 1, pi=-1) + ExactScalar.const(2, n=1)
    assert x.evaluate(3) == pytest.approx(complex(0.25, 1) / math.pi + 6)


def test_str_parse_roundtrip():
    for x in (ZERO, ONE, I, PI, N * PI * PI, ExactScalar.const(Fraction(-7, 3), 2, pi=-2) + N):
        assert ExactScalar.parse(str(x)) == x


def test_hash_consistent_with_equality():
    a = ExactScalar.const(1, 0, pi=1) + ExactScalar.const(0, 1)
    b = ExactScalar.const(0, 1) + PI
    assert a == b and hash(a) == hash(b)


def test_as_scalar_accepts_ints_and_fractions():
    assert as_scalar(2) == ExactScalar.const(2)
    assert as_scalar(Fraction(1, 2)) * 2 == ONE


def test_pi_power_range():
    x = ExactScalar.const(1, pi=-2) + ExactScalar.const(1, pi=1)
    assert x.pi_power_range() == (-2, 1)
