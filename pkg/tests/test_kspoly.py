from fractions import Fraction

import pytest

from qfock.errors import ResourceBudgetError, UsageError
from qfock.fock import apply
from qfock.kspoly import (NCPolynomial, ks_poly, ks_row_formula, monic_op_poly,
                          q_charlier, q_hermite)
from qfock.model import (MomentSequence, ProcessModel, TimeGrid,
                         process_operators)
from qfock.qscalar import EXACT, QScalar, q_int
from qfock.wick import vacuum_vector, word_vector

F = Fraction


@pytest.fixture(scope="module")
def moments():
    # a generic moment sequence: no accidental cancellations
    return MomentSequence([0] + [F(k, k + 1) for k in range(1, 12)])


class TestNCPolynomial:
    def test_mul_preserves_order(self):
        a = NCPolynomial.x(1, EXACT)
        b = NCPolynomial.x(2, EXACT)
        assert (a * b).terms == {(1, 2): EXACT.one()}
        assert a * b != b * a

    def test_add_cancels(self):
        a = NCPolynomial.x(1, EXACT)
        assert (a - a).is_zero

    def test_str_sorted_by_degree(self):
        p = NCPolynomial(EXACT, {(2, 1): EXACT.one(), (): EXACT.of(3)})
        assert str(p) == "(3) · 1 + (1) · x2 x1"

    def test_eval_scalar(self):
        p = NCPolynomial(EXACT, {(1, 2): EXACT.of(2), (): EXACT.one()})
        val = p.eval_scalar(lambda j: EXACT.of(j))
        assert val == EXACT.of(5)  # 2*(1*2) + 1

    def test_variable_indices_validated(self):
        with pytest.raises(UsageError):
            NCPolynomial(EXACT, {(0,): EXACT.one()})


class TestRecursion:
    def test_base_cases(self, moments):
        assert ks_poly((), moments) == NCPolynomial.one(EXACT)
        assert ks_poly((3,), moments) == NCPolynomial.x(3, EXACT)

    def test_pair_by_hand(self, moments):
        # A_(j,k) = x_j x_k - r_{j+k} - x_{j+k}
        got = ks_poly((2, 1), moments)
        want = (NCPolynomial.x(2, EXACT) * NCPolynomial.x(1, EXACT)
                - NCPolynomial.const(moments.r_at(3), EXACT)
                - NCPolynomial.x(3, EXACT))
        assert (got - want).is_zero

    @pytest.mark.parametrize("j", [1, 2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_row_formula(self, moments, j, n):
        assert (ks_poly((j,) + (1,) * n, moments)
                - ks_row_formula(j, n, moments)).is_zero

    def test_length_cap(self, moments):
        with pytest.raises(ResourceBudgetError):
            ks_poly((1,) * 9, moments)


class TestDegenerations:
    def test_hermite_three(self):
        target = NCPolynomial(EXACT, {(1, 1, 1): EXACT.one(),
                                      (1,): -QScalar.parse("2 + q")})
        assert (q_hermite(3) - target).is_zero

    def test_hermite_recursion_coefficients(self):
        # H_4 = x H_3 - [3]_q H_2
        lhs = q_hermite(4)
        rhs = (NCPolynomial.x(1, EXACT) * q_hermite(3)
               - q_hermite(2).scale(q_int(3)))
        assert (lhs - rhs).is_zero

    def test_charlier_two(self):
        target = NCPolynomial(EXACT, {(1, 1): EXACT.one(),
                                      (1,): EXACT.of(-1), (): EXACT.of(-1)})
        assert (q_charlier(2) - target).is_zero

    def test_gaussian_moments_give_hermite(self):
        # with r_2 = 1 and r_k = 0 otherwise, the mixed terms x_{j+k}
        # specialize away for single-variable words only through the pairing
        # terms, reproducing the q-Hermite recursion
        moments = MomentSequence([0, 1] + [0] * 8)
        for n in range(5):
            a = ks_poly((1,) * n, moments)
            drop_high = NCPolynomial(
                EXACT, {w: c for w, c in a.terms.items()
                        if all(j == 1 for j in w)})
            assert (drop_high - q_hermite(n)).is_zero

    def test_monic_op_poly_matches_charlier_style(self):
        # nu = delta_1 gives r_k = 1 for k >= 2; degree-1 OP is x - 1
        moments = MomentSequence([0, 1, 1, 1])
        p1 = monic_op_poly(moments, 1)
        want = NCPolynomial.x(1, EXACT) - NCPolynomial.one(EXACT)
        assert (p1 - want).is_zero


@pytest.fixture(scope="module")
def model():
    atoms = [(-1, F(1, 4)), (0, F(1, 2)), (1, F(1, 4))]
    moments = MomentSequence.from_measure(atoms, 10)
    return ProcessModel(EXACT, moments, TimeGrid.uniform(1, 2), 5, 6)


class TestSubstitution:
    @pytest.mark.parametrize("u", [(1,), (2,), (1, 1), (2, 1), (1, 1, 1),
                                   (2, 1, 1), (1, 1, 1, 1)])
    def test_operator_substitution_hits_tensor_word(self, model, u):
        # A_u(x_j -> Y_j(I)) applied to Omega gives the plain tensor word of
        # the interval letters: the polynomial recursion mirrors the Wick one
        interval = (F(0), F(1))
        ops = process_operators(model, interval)
        a = ks_poly(u, model.moments)
        got = apply(a.evaluate(lambda j: ops.Y[j]), vacuum_vector(model))
        word = tuple(model.interval_letter(interval, k) for k in u)
        want = word_vector(model, word, model.fock_depth)
        assert (got - want).is_zero
