from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qfock.errors import ModeMismatchError, UsageError
from qfock.qscalar import (EXACT, QScalar, ScalarRing, inversions, q_fact,
                           q_fact_ratio, q_int, sym_group)


def poly(*coeffs):
    return QScalar.exact(coeffs)


class TestExactArithmetic:
    def test_add_sub(self):
        a, b = poly(1, 2), poly(0, -2, 3)
        assert a + b == poly(1, 0, 3)
        assert (a + b) - b == a

    def test_mul(self):
        # (1 + q)(1 - q) = 1 - q^2
        assert poly(1, 1) * poly(1, -1) == poly(1, 0, -1)

    def test_zero_normalizes(self):
        assert poly(1) - poly(1) == poly()
        assert (poly(1) - poly(1)).is_zero

    def test_trailing_zeros_trimmed(self):
        assert poly(1, 0, 0).coeffs == (Fraction(1),)

    def test_neg(self):
        assert -poly(1, -2) == poly(-1, 2)


class TestModes:
    def test_mixing_raises(self):
        with pytest.raises(ModeMismatchError):
            poly(1) + QScalar.pinned(1.0, Fraction(1, 2))

    def test_different_pins_raise(self):
        a = QScalar.pinned(1.0, Fraction(1, 2))
        b = QScalar.pinned(1.0, Fraction(1, 3))
        with pytest.raises(ModeMismatchError):
            a * b

    def test_pin_out_of_range(self):
        with pytest.raises(UsageError):
            QScalar.pinned(0.0, 2)

    def test_eval_at(self):
        v = poly(1, 1, 1).eval_at(Fraction(1, 2))
        assert v.val == pytest.approx(1.75)

    def test_subs_exact(self):
        assert poly(1, 1, 1).subs(Fraction(1, 2)) == Fraction(7, 4)


class TestSerialization:
    def test_str_examples(self):
        assert str(poly(1, Fraction(-1, 2), 1)) == "1 - 1/2*q + q^2"
        assert str(poly()) == "0"

    @given(st.lists(st.fractions(max_denominator=20), max_size=6))
    def test_parse_round_trip(self, coeffs):
        s = QScalar.exact(coeffs)
        assert QScalar.parse(str(s)) == s


class TestQCombinatorics:
    def test_q_int(self):
        assert q_int(0) == poly()
        assert q_int(3) == poly(1, 1, 1)

    def test_q_fact(self):
        # [3]_q! = (1)(1+q)(1+q+q^2)
        assert q_fact(3) == poly(1, 1, 1) * poly(1, 1)

    def test_q_fact_ratio(self):
        assert q_fact_ratio(4, 2) == q_int(3) * q_int(4)
        assert q_fact_ratio(4, 0) == EXACT.one()
        with pytest.raises(UsageError):
            q_fact_ratio(2, 3)

    def test_inversions(self):
        assert inversions((1, 2, 3)) == 0
        assert inversions((3, 2, 1)) == 3
        with pytest.raises(UsageError):
            inversions((1, 1))

    def test_sym_group_size(self):
        assert len(list(sym_group(4))) == 24

    @given(st.permutations(list(range(1, 6))))
    def test_inversions_reverse_complement(self, sigma):
        rev = tuple(reversed(sigma))
        n = len(sigma)
        assert inversions(tuple(sigma)) + inversions(rev) == n * (n - 1) // 2


def test_ring_modes():
    assert EXACT.exact
    r = ScalarRing(Fraction(1, 3))
    assert not r.exact
    assert float(r.q_pow(2)) == pytest.approx(1 / 9)
    assert r.of(Fraction(1, 2)).q0 == Fraction(1, 3)
