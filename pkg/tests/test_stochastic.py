from fractions import Fraction

import pytest

from qfock.errors import ResourceBudgetError, UsageError
from qfock.fock import FockOperator, FockVector, apply, gamma_q, innerq
from qfock.model import MomentSequence, ProcessModel, TimeGrid
from qfock.partitions import SetPartition, enumerate_partitions
from qfock.qscalar import EXACT, ScalarRing
from qfock.stochastic import (AdaptedProcess, BiProcess, StepFunction,
                              biprocess_inner, biprocess_integral,
                              chaos_component_vector, chaos_decompose,
                              conditional_expectation, delta_process,
                              ito_integral, ito_isometry_rhs, l2q_inner,
                              multiple_integral, power_decomposition,
                              st_pi_closed, st_pi_convergence,
                              st_pi_corollary_form, st_pi_discrete,
                              st_pi_free_form, st_pi_gaussian_form,
                              two_sided_closed, two_sided_defect_vector,
                              two_sided_discrete, x_process)
from qfock.wick import WickElement, vacuum_vector, word_vector

F = Fraction


def three_point(n_atoms=4, cutoff=5, depth=6, ring=EXACT):
    atoms = [(-1, F(1, 4)), (0, F(1, 2)), (1, F(1, 4))]
    moments = MomentSequence.from_measure(atoms, 2 * cutoff)
    return ProcessModel(ring, moments, TimeGrid.uniform(1, n_atoms), cutoff, depth)


def two_point(n_atoms=4, cutoff=2, depth=6, ring=EXACT):
    moments = MomentSequence.from_measure(
        [(-1, F(1, 2)), (1, F(1, 2))], 2 * cutoff)
    return ProcessModel(ring, moments, TimeGrid.uniform(1, n_atoms), cutoff, depth)


def gaussian(n_atoms=4, cutoff=4, depth=6, ring=EXACT):
    moments = MomentSequence([0, 1] + [0] * (2 * cutoff - 2))
    return ProcessModel(ring, moments, TimeGrid.uniform(1, n_atoms), cutoff, depth)


@pytest.fixture(scope="module")
def model():
    return three_point()


class TestStepFunctions:
    def test_rectangle_support(self, model):
        f = StepFunction.rectangle(model, [(0, F(1, 2)), (F(1, 2), 1)])
        assert set(f.values) == {(a, b) for a in (0, 1) for b in (2, 3)}
        assert f.is_off_diagonal()

    def test_arity_validated(self, model):
        with pytest.raises(UsageError):
            StepFunction(model, 2, {(0,): EXACT.one()})

    def test_l2q_off_diagonal_pair(self, model):
        f = StepFunction(model, 2, {(0, 1): EXACT.one()})
        assert l2q_inner(f, f) == EXACT.of(F(1, 16))

    def test_l2q_diagonal_pair_gets_q(self, model):
        f = StepFunction(model, 2, {(0, 0): EXACT.one()})
        assert l2q_inner(f, f) == (EXACT.one() + EXACT.q()) * EXACT.of(F(1, 16))

    def test_l2q_arity_cap(self, model):
        f = StepFunction(model, 8, {tuple(range(4)) * 2: EXACT.one()})
        with pytest.raises(ResourceBudgetError):
            l2q_inner(f, f)


class TestMultipleIntegrals:
    def test_diagonal_support_rejected(self, model):
        f = StepFunction(model, 2, {(1, 1): EXACT.one()})
        with pytest.raises(UsageError):
            multiple_integral(f, [x_process(model)] * 2)

    @pytest.mark.parametrize("ivs", [
        [(0, F(1, 4)), (F(1, 4), F(3, 4))],
        [(0, F(1, 2)), (F(1, 2), 1)],
        [(F(1, 4), F(1, 2)), (F(1, 2), 1)],
    ])
    def test_isometry_on_rectangles(self, model, ivs):
        procs = [x_process(model)] * 2
        f = StepFunction.rectangle(model, ivs)
        g = StepFunction.rectangle(model, list(reversed(ivs)))
        om = vacuum_vector(model)
        for h1, h2 in ((f, f), (f, g), (g, g)):
            lhs = innerq(apply(multiple_integral(h1, procs), om),
                         apply(multiple_integral(h2, procs), om))
            assert lhs == l2q_inner(h1, h2)


class TestStochasticMeasures:
    @pytest.mark.parametrize("n", range(1, 5))
    def test_power_decomposition(self, model, n):
        assert power_decomposition(n, 1, model).exact

    def test_power_decomposition_partial_time(self, model):
        assert power_decomposition(3, F(1, 2), model).exact

    def test_gaussian_specialization(self):
        m = gaussian()
        om = vacuum_vector(m)
        for pi in enumerate_partitions(4):
            # blocks of size > 2 leave null-vector words behind, so compare
            # in the q-seminorm rather than termwise
            diff = (apply(st_pi_closed(pi, 1, m), om)
                    - apply(st_pi_gaussian_form(pi, 1, m), om))
            assert innerq(diff, diff).is_zero, str(pi)

    def test_free_specialization_at_q_zero(self, model):
        om = vacuum_vector(model)
        for pi in enumerate_partitions(3):
            diff = (apply(st_pi_closed(pi, 1, model), om)
                    - apply(st_pi_free_form(pi, 1, model), om))
            for c in diff.terms.values():
                assert c.subs(0) == 0, str(pi)

    @pytest.mark.parametrize("blocks", [
        [[1, 4], [2], [3]],
        [[1, 2, 4], [3]],
        [[1, 2, 3, 4]],
    ])
    def test_corollary_form(self, model, blocks):
        pi = SetPartition.of(blocks)
        om = vacuum_vector(model)
        lhs = apply(st_pi_closed(pi, 1, model), om)
        rhs = apply(st_pi_corollary_form(pi, 1, model), om)
        assert (lhs - rhs).is_zero

    def test_discrete_converges(self):
        pi = SetPartition.of([[1, 2]])
        table = st_pi_convergence(
            pi, 1, lambda n: two_point(n_atoms=n, ring=ScalarRing(F(1, 2))),
            (4, 8, 16), label="pair")
        errs = [r.l2_error for r in table.rows]
        assert errs[0] > errs[1] > errs[2] > 0
        assert table.slope() > 0.8

    def test_convergence_requires_float(self, model):
        with pytest.raises(UsageError):
            st_pi_convergence(SetPartition.of([[1, 2]]), 1,
                              lambda n: three_point(n_atoms=n), (2, 4, 8))


class TestChaosDecomposition:
    # the three-point measure carries orthogonal polynomials through degree
    # 2 only, so these tests run at cutoff 3
    def test_reconstruction_and_orthogonality(self):
        model = three_point(cutoff=3)
        l1 = model.atom_letter(0, 2)
        l2 = model.atom_letter(1, 1)
        v = (word_vector(model, (l1, l2), model.fock_depth)
             + word_vector(model, (l2,), model.fock_depth).scale(EXACT.of(3)))
        comps = chaos_decompose(v, model)
        back = FockVector(model.space, model.fock_depth)
        vecs = {}
        for u, f in comps.items():
            vecs[u] = chaos_component_vector(model, u, f)
            back = back + vecs[u]
        assert back == v
        keys = list(vecs)
        for i in range(len(keys)):
            for j in range(i + 1, len(keys)):
                if sorted(keys[i]) != sorted(keys[j]):
                    assert innerq(vecs[keys[i]], vecs[keys[j]]).is_zero

    def test_vacuum_component(self):
        model = three_point(cutoff=3)
        om = vacuum_vector(model)
        comps = chaos_decompose(om, model)
        assert set(comps) == {()}


class TestItoCalculus:
    half, threeq = F(1, 2), F(3, 4)

    def make_processes(self, model):
        u_val = WickElement.from_word(model, (model.atom_letter(0),))
        v_val = (WickElement.from_word(model, (model.atom_letter(0),
                                               model.atom_letter(1)))
                 + WickElement.one(model).scale(model.ring.of(2)))
        u = AdaptedProcess(model, [((self.half, self.threeq), u_val),
                                   ((self.threeq, 1), v_val)])
        v = AdaptedProcess(model, [((self.half, self.threeq), v_val),
                                   ((self.threeq, 1), u_val)])
        return u_val, v_val, u, v

    def test_adaptedness_enforced(self):
        m = two_point()
        future = WickElement.from_word(m, (m.atom_letter(3),))
        with pytest.raises(UsageError):
            AdaptedProcess(m, [((self.half, self.threeq), future)])

    def test_overlap_rejected(self):
        m = two_point()
        val = WickElement.one(m)
        with pytest.raises(UsageError):
            AdaptedProcess(m, [((self.half, 1), val), ((self.threeq, 1), val)])

    @pytest.mark.parametrize("side", ["left", "right"])
    def test_ito_isometry(self, side):
        m = two_point()
        _, _, u, v = self.make_processes(m)
        om = vacuum_vector(m)
        lhs = innerq(apply(ito_integral(u, side), om),
                     apply(ito_integral(v, side), om))
        assert lhs == ito_isometry_rhs(u, v)

    def test_conditional_expectation_is_idempotent_and_mean_preserving(self):
        m = two_point()
        _, v_val, _, _ = self.make_processes(m)
        el = conditional_expectation(v_val, self.half)
        again = conditional_expectation(el, self.half)
        assert (el.vector() - again.vector()).is_zero
        # compatible conditioning times compose
        smaller = conditional_expectation(v_val, F(1, 4))
        via = conditional_expectation(el, F(1, 4))
        assert (smaller.vector() - via.vector()).is_zero

    def test_conditional_sandwich(self):
        # E_s[X([s,t)) Z X([s,t))] = (t-s) r_2 Gamma_q(q)(Z)
        m = two_point()
        u_val, v_val, _, _ = self.make_processes(m)
        om = vacuum_vector(m)
        s, t = self.half, self.threeq
        x_st = m.interval_letter((s, t)).field()
        for z in (u_val, v_val):
            sandwich = FockOperator.compose([x_st, z.operator(), x_st])
            lhs = conditional_expectation(
                WickElement.from_vector(m, apply(sandwich, om)), s)
            rhs = z.gamma().scale(m.ring.of((t - s) * m.moments.r_at(2)))
            assert (lhs.vector() - rhs.vector()).is_zero

    def test_two_sided_defect_identity(self):
        m = two_point()
        u_val, _, _, _ = self.make_processes(m)
        adapted = AdaptedProcess(m, [((self.half, 1), u_val)])
        om = vacuum_vector(m)
        disc = apply(two_sided_discrete(adapted), om)
        closed = apply(two_sided_closed(adapted), om)
        assert (disc - closed - two_sided_defect_vector(adapted)).is_zero

    def test_biprocess_isometry_gaussian(self):
        m = gaussian()
        u_val = WickElement.from_word(m, (m.atom_letter(0),))
        v_val = (WickElement.from_word(m, (m.atom_letter(0), m.atom_letter(1)))
                 + WickElement.one(m).scale(m.ring.of(2)))
        bi_u = BiProcess(m, [((self.half, self.threeq), [(u_val, v_val)])])
        bi_v = BiProcess(m, [((self.half, self.threeq), [(v_val, u_val)])])
        om = vacuum_vector(m)
        for a, b in ((bi_u, bi_u), (bi_u, bi_v), (bi_v, bi_v)):
            lhs = innerq(apply(biprocess_integral(a), om),
                         apply(biprocess_integral(b), om))
            assert lhs == biprocess_inner(a, b)

    def test_biprocess_adaptedness(self):
        m = two_point()
        future = WickElement.from_word(m, (m.atom_letter(3),))
        with pytest.raises(UsageError):
            BiProcess(m, [((self.half, self.threeq),
                           [(future, WickElement.one(m))])])

    def test_one_sided_is_a_special_biprocess(self):
        m = gaussian()
        val = WickElement.from_word(m, (m.atom_letter(0),))
        adapted = AdaptedProcess(m, [((self.half, 1), val)])
        bi = BiProcess(m, [((self.half, 1), [(val, WickElement.one(m))])])
        om = vacuum_vector(m)
        assert apply(ito_integral(adapted, "left"), om) == \
            apply(biprocess_integral(bi), om)
