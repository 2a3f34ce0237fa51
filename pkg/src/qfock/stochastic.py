"""Stochastic measures, multiple integrals, and the grid Itô calculus.

Limits never appear literally: every limit statement splits into an exact
closed form (grid-independent, verified in Q[q]) and a float refinement
experiment with a slope assertion.  The squared L²(phi) distance between the
discrete partition sum and its closed form is reported as l2_error; it decays
linearly in the mesh.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log
from typing import Callable, Iterable, Sequence

from .errors import ResourceBudgetError, UsageError
from .fock import FockOperator, FockVector, adjoint, apply, innerq, project
from .model import (Interval, Letter, ProcessModel, monic_op_coefficients,
                    process_operators)
from .partitions import (ExtendedPartition, SetPartition, classify,
                         enumerate_partitions, index_tuples, rc)
from .qscalar import QScalar, inversions, sym_group
from .wick import WickElement, vacuum_vector, wick_operator, word_vector

L2Q_MAX_ARITY = 7


# ---------------------------------------------------------------------------
# step functions and the q-inner product on them


class StepFunction:
    """A finitely supported function on n-tuples of grid atoms."""

    def __init__(self, model: ProcessModel, arity: int,
                 values: dict[tuple[int, ...], QScalar]):
        self.model = model
        self.arity = arity
        self.values: dict[tuple[int, ...], QScalar] = {}
        for tup, c in values.items():
            if len(tup) != arity:
                raise UsageError(f"tuple {tup} does not have arity {arity}")
            if any(not 0 <= a < model.grid.n_atoms for a in tup):
                raise UsageError(f"atom index out of range in {tup}")
            if not c.is_zero:
                self.values[tup] = c

    @staticmethod
    def rectangle(model: ProcessModel, intervals: Sequence[Interval]) -> "StepFunction":
        """The indicator of I_1 x ... x I_n."""
        grids = [model.grid.atoms_in(i) for i in intervals]
        values: dict[tuple[int, ...], QScalar] = {}

        def rec(prefix: tuple[int, ...]):
            if len(prefix) == len(grids):
                values[prefix] = model.ring.one()
                return
            for a in grids[len(prefix)]:
                rec(prefix + (a,))

        rec(())
        return StepFunction(model, len(grids), values)

    def is_off_diagonal(self) -> bool:
        return all(len(set(t)) == len(t) for t in self.values)

    def scale(self, c: QScalar) -> "StepFunction":
        return StepFunction(self.model, self.arity,
                            {t: v * c for t, v in self.values.items()})

    def __add__(self, other: "StepFunction") -> "StepFunction":
        if other.model is not self.model or other.arity != self.arity:
            raise UsageError("mismatched step functions")
        out = dict(self.values)
        for t, c in other.values.items():
            cur = out.get(t)
            out[t] = c if cur is None else cur + c
        return StepFunction(self.model, self.arity, out)


def l2q_inner(f: StepFunction, g: StepFunction) -> QScalar:
    """The q-symmetrized overlap sum Σ_σ q^{i(σ)} ∫ F(t) G(t∘σ)."""
    if f.model is not g.model:
        raise UsageError("step functions on different models")
    if f.arity != g.arity:
        raise UsageError(f"arity mismatch: {f.arity} vs {g.arity}")
    n = f.arity
    if n > L2Q_MAX_ARITY:
        raise ResourceBudgetError(f"l2q_inner capped at arity {L2Q_MAX_ARITY}")
    ring = f.model.ring
    grid = f.model.grid
    total = ring.zero()
    perms = [(s, inversions(s)) for s in sym_group(n)]
    for u, cf in f.values.items():
        weight = Fraction(1)
        for a in u:
            weight *= grid.width(a)
        for sigma, inv in perms:
            v = [0] * n
            for i in range(n):
                v[sigma[i] - 1] = u[i]
            cg = g.values.get(tuple(v))
            if cg is not None:
                total = total + cf * cg * ring.q_pow(inv) * ring.of(weight)
    return total


# ---------------------------------------------------------------------------
# process families


class ProcessFamily:
    """One integrator process: a letter per atom, plus a deterministic drift
    rate (nonzero only for the diagonal measures Delta_k)."""

    def __init__(self, model: ProcessModel, label: str,
                 letter_fn: Callable[[int], Letter], drift_rate: Fraction):
        self.model = model
        self.label = label
        self._letter_fn = letter_fn
        self.drift_rate = drift_rate

    def letter(self, atom: int) -> Letter:
        return self._letter_fn(atom)

    def prefix_letter(self, t) -> Letter:
        atoms = self.model.grid.prefix(t)
        out = self.model.letter({})
        for a in atoms:
            out = out + self.letter(a)
        return out

    def __repr__(self):
        return f"ProcessFamily({self.label})"


def x_process(model: ProcessModel) -> ProcessFamily:
    return ProcessFamily(model, "X", lambda a: model.atom_letter(a, 1), Fraction(0))


def y_process(model: ProcessModel, k: int) -> ProcessFamily:
    return ProcessFamily(model, f"Y{k}", lambda a: model.atom_letter(a, k),
                         Fraction(0))


def delta_process(model: ProcessModel, k: int) -> ProcessFamily:
    return ProcessFamily(model, f"Delta{k}", lambda a: model.atom_letter(a, k),
                         model.moments.r_at(k))


def yhat_process(model: ProcessModel, k: int) -> ProcessFamily:
    coeffs = monic_op_coefficients(model.moments, k - 1)

    def letter(a: int) -> Letter:
        return model.letter({(a, j): c for j, c in enumerate(coeffs, start=1) if c})

    return ProcessFamily(model, f"Yhat{k}", letter, Fraction(0))


# ---------------------------------------------------------------------------
# multiple Wiener-Itô integrals


def multiple_integral(f: StepFunction, procs: Sequence[ProcessFamily]) -> FockOperator:
    """Σ_u F(u) proc_1(I_{u(1)}) ... proc_n(I_{u(n)}), off-diagonal F only."""
    if len(procs) != f.arity:
        raise UsageError(f"need {f.arity} integrator processes, got {len(procs)}")
    if not f.is_off_diagonal():
        raise UsageError("multiple integrals require off-diagonal support")
    ring = f.model.ring
    terms = []
    for tup, c in f.values.items():
        factors = [procs[i].letter(a).field() for i, a in enumerate(tup)]
        terms.append(FockOperator.compose(factors).scale(c))
    if not terms:
        return FockOperator.scalar(ring.zero())
    return FockOperator.opsum(terms)


def psi_closed(procs: Sequence[ProcessFamily], t) -> FockOperator:
    """Closed form of the full stochastic measure psi(Z_1, ..., Z_m)(t):
    drift positions split off multilinearly, the rest is a Wick product of
    prefix letters."""
    if not procs:
        raise UsageError("psi of no processes")
    model = procs[0].model
    ring = model.ring
    t = Fraction(t)
    prefix = [p.prefix_letter(t) for p in procs]
    drifty = [i for i, p in enumerate(procs) if p.drift_rate]
    terms = []
    for mask in range(1 << len(drifty)):
        chosen = {drifty[b] for b in range(len(drifty)) if mask >> b & 1}
        factor = Fraction(1)
        for i in chosen:
            factor *= t * procs[i].drift_rate
        word = tuple(prefix[i] for i in range(len(procs)) if i not in chosen)
        terms.append(wick_operator(model, word).scale(ring.of(factor)))
    return FockOperator.opsum(terms)


def psi_discrete(procs: Sequence[ProcessFamily], t) -> FockOperator:
    """Σ over tuples of distinct atoms of Π Z_i(I_{u(i)}) + drift terms."""
    model = procs[0].model
    ring = model.ring
    atoms = model.grid.prefix(t)
    n = len(procs)
    if n == 0:
        raise UsageError("psi of no processes")
    terms = []
    # Delta_k(I) = Y_k(I) + |I| r_k: per-atom operator includes the drift
    full = []
    for i, p in enumerate(procs):
        per_atom = {}
        for a in atoms:
            op = p.letter(a).field()
            if p.drift_rate:
                op = op + FockOperator.scalar(
                    ring.of(model.grid.width(a) * p.drift_rate))
            per_atom[a] = op
        full.append(per_atom)
    pi0 = SetPartition.of([[i] for i in range(1, n + 1)])
    for tup in index_tuples(len(atoms), pi0):
        factors = [full[i][atoms[v - 1]] for i, v in enumerate(tup)]
        terms.append(FockOperator.compose(factors))
    if not terms:
        return FockOperator.scalar(ring.zero())
    return FockOperator.opsum(terms)


# ---------------------------------------------------------------------------
# partition-dependent stochastic measures


def st_pi_discrete(pi: SetPartition, t, model: ProcessModel) -> FockOperator:
    """St_pi(t; grid) = Σ over index tuples constant exactly on pi of
    X(I_{u(1)}) ... X(I_{u(n)})."""
    atoms = model.grid.prefix(t)
    n = pi.n
    if n > model.fock_depth:
        raise UsageError(f"partition on {n} points exceeds depth {model.fock_depth}")
    fields = {a: model.atom_letter(a, 1).field() for a in atoms}
    terms = [FockOperator.compose([fields[atoms[v - 1]] for v in tup])
             for tup in index_tuples(len(atoms), pi)]
    if not terms:
        return FockOperator.scalar(model.ring.zero())
    return FockOperator.opsum(terms)


def st_pi_closed(pi: SetPartition, t, model: ProcessModel) -> FockOperator:
    """St_pi(t) = Σ_{S ⊆ pi} q^{rc(S,pi)} R_{pi∖S}(t) W(⊗_{B∈S} prefix letter
    of power |B|), with R_σ(t) = Π_{B∈σ} t r_{|B|}."""
    ring = model.ring
    t = Fraction(t)
    sizes = pi.block_sizes()
    if max(sizes) > model.degree_cutoff:
        raise UsageError("block size exceeds the degree cutoff")
    prefix = {k: model.prefix_letter(t, k) for k in set(sizes)}
    terms = []
    m = pi.size
    for mask in range(1 << m):
        s = frozenset(b for b in range(m) if mask >> b & 1)
        factor = Fraction(1)
        for b in range(m):
            if b not in s:
                factor *= t * model.moments.r_at(sizes[b])
        if not factor:
            continue
        ep = ExtendedPartition(pi, s)
        word = tuple(prefix[sizes[b]] for b in sorted(s))
        terms.append(wick_operator(model, word).scale(
            ring.q_pow(rc(ep)) * ring.of(factor)))
    if not terms:
        return FockOperator.scalar(ring.zero())
    return FockOperator.opsum(terms)


def st_pi_gaussian_form(pi: SetPartition, t, model: ProcessModel) -> FockOperator:
    """The singleton-pair specialization q^{rc(Sing,pi)} t^{|Pairs|}
    psi_{|Sing|}(t); the zero operator when pi has a block of size > 2."""
    ring = model.ring
    t = Fraction(t)
    cls = classify(pi)
    if len(cls.singletons) + len(cls.pairs) != pi.size:
        return FockOperator.scalar(ring.zero())
    sing = frozenset(i for i, b in enumerate(pi.blocks) if len(b) == 1)
    ep = ExtendedPartition(pi, sing)
    word = (model.prefix_letter(t, 1),) * len(cls.singletons)
    return wick_operator(model, word).scale(
        ring.q_pow(rc(ep)) * ring.of(t ** len(cls.pairs)))


def st_pi_free_form(pi: SetPartition, t, model: ProcessModel) -> FockOperator:
    """The noncrossing specialization R_{Inner}(t) psi(Delta_{|B|}: B in
    Outer); the zero operator for crossing pi.  Meaningful at q = 0."""
    ring = model.ring
    t = Fraction(t)
    cls = classify(pi)
    if not cls.is_noncrossing:
        return FockOperator.scalar(ring.zero())
    factor = Fraction(1)
    for b in cls.inner_blocks:
        factor *= t * model.moments.r_at(len(b))
    procs = [delta_process(model, len(b)) for b in cls.outer_blocks]
    return psi_closed(procs, t).scale(ring.of(factor))


def st_pi_corollary_form(pi: SetPartition, t, model: ProcessModel) -> FockOperator:
    """For pi with one block of size k containing both endpoints and
    singletons elsewhere: q^{n-k} psi(Delta_k, X, ..., X)(t)."""
    n = pi.n
    big = [b for b in pi.blocks if len(b) > 1]
    if len(big) != 1 or not all(len(b) == 1 for b in pi.blocks if b != big[0]):
        raise UsageError("partition is not one block plus singletons")
    k = len(big[0])
    if big[0][0] != 1 or big[0][-1] != n:
        raise UsageError("the big block must contain both 1 and n")
    procs = [delta_process(model, k)] + [x_process(model)] * (n - k)
    return psi_closed(procs, t).scale(model.ring.q_pow(n - k))


@dataclass
class PowerDecomposition:
    n: int
    lhs: FockVector
    rhs: FockVector

    @property
    def exact(self) -> bool:
        return (self.lhs - self.rhs).is_zero


def power_decomposition(n: int, t, model: ProcessModel) -> PowerDecomposition:
    """X(t)^n Ω versus Σ_pi St_pi(t) Ω, via closed forms."""
    if n < 1 or n > 6:
        raise UsageError("power_decomposition supports 1 <= n <= 6")
    x = model.prefix_letter(t, 1).field()
    lhs = vacuum_vector(model)
    for _ in range(n):
        lhs = apply(x, lhs)
    rhs = FockVector(model.space, model.fock_depth)
    for pi in enumerate_partitions(n):
        rhs = rhs + apply(st_pi_closed(pi, t, model), vacuum_vector(model))
    return PowerDecomposition(n, lhs, rhs)


@dataclass
class ConvergenceRow:
    n_atoms: int
    delta: float
    l2_error: float


@dataclass
class ConvergenceTable:
    label: str
    rows: list[ConvergenceRow]

    def slope(self) -> float:
        pts = [(log(r.delta), log(r.l2_error)) for r in self.rows if r.l2_error > 0]
        if len(pts) < 3:
            raise UsageError("slope fit needs at least 3 nonzero-error rows")
        xs, ys = zip(*pts)
        n = len(pts)
        mx, my = sum(xs) / n, sum(ys) / n
        return (sum((x - mx) * (y - my) for x, y in zip(xs, ys))
                / sum((x - mx) ** 2 for x in xs))


def st_pi_convergence(pi: SetPartition, t,
                      model_factory: Callable[[int], ProcessModel],
                      schedule: Sequence[int], label: str = "") -> ConvergenceTable:
    """Squared L²(phi) distance between St_pi(t; grid) and the closed form,
    per grid size.  Float mode."""
    if not schedule:
        raise UsageError("empty refinement schedule")
    rows = []
    for n_atoms in schedule:
        model = model_factory(n_atoms)
        if model.ring.exact:
            raise UsageError("convergence experiments require float mode")
        om = vacuum_vector(model)
        diff = (apply(st_pi_discrete(pi, t, model), om)
                - apply(st_pi_closed(pi, t, model), om))
        err = float(innerq(diff, diff))
        rows.append(ConvergenceRow(n_atoms, float(model.grid.mesh()), abs(err)))
    return ConvergenceTable(label or f"st_pi {pi}", rows)


# ---------------------------------------------------------------------------
# chaos decomposition


def _monomials_in_op_basis(model: ProcessModel) -> list[list[Fraction]]:
    """gamma[k][j]: x^{k-1} = Σ_j gamma[k][j] P_{j-1}, 1-based in k and j."""
    d = model.degree_cutoff
    gamma = [[Fraction(0)] * (d + 1) for _ in range(d + 1)]
    for k in range(1, d + 1):
        # invert the unitriangular system P_{k-1} = x^{k-1} + lower terms
        coeffs = monic_op_coefficients(model.moments, k - 1)
        gamma[k][k] = Fraction(1)
        for j in range(1, k):
            # subtract coeffs[j-1] * x^{j-1}, already expressed in OPs
            for i in range(1, j + 1):
                gamma[k][i] -= coeffs[j - 1] * gamma[j][i]
    return gamma


def yhat_atom_letter(model: ProcessModel, atom: int, k: int) -> Letter:
    coeffs = monic_op_coefficients(model.moments, k - 1)
    return model.letter({(atom, j): c for j, c in enumerate(coeffs, start=1) if c})


def chaos_decompose(v: FockVector, model: ProcessModel) -> dict[tuple[int, ...], StepFunction]:
    """Expand v in the basis {atoms ⊗ monic orthogonal polynomials}: the
    degree-n term of the multi-index u is the step function F_u with
    v = Σ_u Σ_{a⃗} F_u(a⃗) ⊗_i (e-letter of P_{u(i)-1} on atom a_i)."""
    if v.space != model.space:
        raise UsageError("vector does not live on this model's space")
    gamma = _monomials_in_op_basis(model)
    out: dict[tuple[int, ...], dict[tuple[int, ...], QScalar]] = {}
    for word, c in v.terms.items():
        slots = [model.atom_power(i) for i in word]

        def rec(pos: int, u: tuple[int, ...], coeff: Fraction):
            if pos == len(slots):
                bucket = out.setdefault(u, {})
                atoms = tuple(a for a, _ in slots)
                cur = bucket.get(atoms)
                add = c * model.ring.of(coeff)
                bucket[atoms] = add if cur is None else cur + add
                return
            _, k = slots[pos]
            for j in range(1, k + 1):
                if gamma[k][j]:
                    rec(pos + 1, u + (j,), coeff * gamma[k][j])

        rec(0, (), Fraction(1))
    return {u: StepFunction(model, len(u), vals) for u, vals in out.items()
            if any(not c.is_zero for c in vals.values())}


def chaos_component_vector(model: ProcessModel, u: tuple[int, ...],
                           f: StepFunction) -> FockVector:
    """Σ_{a⃗} F_u(a⃗) ⊗_i (Yhat_{u(i)} letter on atom a_i)."""
    out = FockVector(model.space, model.fock_depth)
    for atoms, c in f.values.items():
        word = tuple(yhat_atom_letter(model, a, k) for a, k in zip(atoms, u))
        out = out + word_vector(model, word, model.fock_depth).scale(c)
    return out


# ---------------------------------------------------------------------------
# adapted processes and Itô integrals


def _letter_end(letter: Letter) -> Fraction:
    """Latest time touched by a letter's support."""
    grid = letter.algebra.grid
    return max((grid.atoms[a][1] for (a, _), _ in letter.payload),
               default=Fraction(0))


class AdaptedProcess:
    """Piecewise constant process (I_i, U_i) with U_i supported strictly
    before the start of I_i."""

    def __init__(self, model: ProcessModel,
                 pieces: Sequence[tuple[Interval, WickElement]]):
        self.model = model
        self.pieces = []
        for (a, b), u in pieces:
            a, b = Fraction(a), Fraction(b)
            if u.algebra is not model:
                raise UsageError("process values from a different model")
            for word in u.terms:
                for letter in word:
                    if _letter_end(letter) > a:
                        raise UsageError(
                            f"process value on [{a},{b}) uses letters past {a}: "
                            "not adapted")
            self.pieces.append(((a, b), u))
        intervals = sorted(i for i, _ in self.pieces)
        for (_, b1), (a2, _) in zip(intervals, intervals[1:]):
            if b1 > a2:
                raise UsageError("process intervals overlap")


def ito_integral(u: AdaptedProcess, side: str) -> FockOperator:
    """Σ U_i X(I_i) (side="left") or Σ X(I_i) U_i (side="right")."""
    if side not in ("left", "right"):
        raise UsageError(f"side must be left or right, got {side!r}")
    model = u.model
    terms = []
    for interval, val in u.pieces:
        x = model.interval_letter(interval).field()
        w = val.operator()
        terms.append(FockOperator.compose([w, x] if side == "left" else [x, w]))
    if not terms:
        return FockOperator.scalar(model.ring.zero())
    return FockOperator.opsum(terms)


def ito_isometry_rhs(u: AdaptedProcess, v: AdaptedProcess) -> QScalar:
    """r₂ ∫ <U(t), V(t)>_phi dt for processes on a common decomposition."""
    model = u.model
    ring = model.ring
    r2 = model.moments.r_at(2)
    by_interval = {i: val for i, val in v.pieces}
    total = ring.zero()
    for interval, uval in u.pieces:
        vval = by_interval.get(interval)
        if vval is None:
            continue
        width = interval[1] - interval[0]
        total = total + ring.of(r2 * width) * innerq(uval.vector(), vval.vector())
    return total


def two_sided_closed(u: AdaptedProcess) -> FockOperator:
    """∫ dX U dX as the closed form Σ Delta₂(I_i) Γ_q(q)(U_i)."""
    model = u.model
    terms = []
    for interval, val in u.pieces:
        d2 = process_operators(model, interval).Delta[2]
        terms.append(FockOperator.compose([d2, val.gamma().operator()]))
    if not terms:
        return FockOperator.scalar(model.ring.zero())
    return FockOperator.opsum(terms)


def two_sided_discrete(u: AdaptedProcess) -> FockOperator:
    """Σ_i Σ_{J ⊆ I_i} X(J) U_i X(J) over the grid atoms of each interval."""
    model = u.model
    terms = []
    for interval, val in u.pieces:
        w = val.operator()
        for a in model.grid.atoms_in(interval):
            x = model.atom_letter(a, 1).field()
            terms.append(FockOperator.compose([x, w, x]))
    if not terms:
        return FockOperator.scalar(model.ring.zero())
    return FockOperator.opsum(terms)


def two_sided_defect_vector(u: AdaptedProcess) -> FockVector:
    """The exact finite-grid discrepancy on Ω: Σ_i Σ_{J ⊆ I_i} Σ_words
    coeff · (xi_J ⊗ word ⊗ xi_J)."""
    model = u.model
    out = FockVector(model.space, model.fock_depth)
    for interval, val in u.pieces:
        for a in model.grid.atoms_in(interval):
            la = model.atom_letter(a, 1)
            for word, c in val.terms.items():
                out = out + word_vector(model, (la,) + word + (la,),
                                        model.fock_depth).scale(c)
    return out


# ---------------------------------------------------------------------------
# conditional expectation


def past_projection(model: ProcessModel, t) -> FockOperator:
    """P_t as an operator: drop words touching atoms at or after t."""
    t = Fraction(t)
    if t not in model.grid.boundaries:
        raise UsageError(f"time {t} is not a grid boundary")

    def keep(i: int) -> bool:
        atom, _ = model.atom_power(i)
        return model.grid.atoms[atom][1] <= t

    return FockOperator.linear(lambda v: project(v, keep), f"P_{t}")


def conditional_expectation(a: WickElement, t) -> WickElement:
    """E_t[W(v)] = W(P_t v): restrict every letter to atoms before t."""
    model = a.algebra
    t = Fraction(t)
    if t not in model.grid.boundaries:
        raise UsageError(f"time {t} is not a grid boundary")

    def restrict(letter: Letter) -> Letter:
        kept = {ak: c for ak, c in letter.payload
                if model.grid.atoms[ak[0]][1] <= t}
        return model.letter(kept)

    return a.map_letters(restrict)


# ---------------------------------------------------------------------------
# bi-processes


class BiProcess:
    """Finite sum of A ⊗ B pairs of adapted values on a common interval
    decomposition: pieces are (interval, [(A, B), ...])."""

    def __init__(self, model: ProcessModel,
                 pieces: Sequence[tuple[Interval, Sequence[tuple[WickElement, WickElement]]]]):
        self.model = model
        self.pieces = []
        for (a, b), pairs in pieces:
            a, b = Fraction(a), Fraction(b)
            for left, right in pairs:
                for element in (left, right):
                    for word in element.terms:
                        for letter in word:
                            if _letter_end(letter) > a:
                                raise UsageError(
                                    f"bi-process value on [{a},{b}) not adapted")
            self.pieces.append(((a, b), tuple(pairs)))

    def decomposition(self) -> tuple[Interval, ...]:
        return tuple(i for i, _ in self.pieces)


def biprocess_integral(u: BiProcess) -> FockOperator:
    """∫ U ♯ dX = Σ_j Σ_i A^i_j X(I_j) B^i_j."""
    model = u.model
    terms = []
    for interval, pairs in u.pieces:
        x = model.interval_letter(interval).field()
        for left, right in pairs:
            terms.append(FockOperator.compose([left.operator(), x, right.operator()]))
    if not terms:
        return FockOperator.scalar(model.ring.zero())
    return FockOperator.opsum(terms)


def _gamma_of_product(model: ProcessModel, a1: WickElement, a2: WickElement) -> FockOperator:
    """Γ_q(q)(A₁* A₂) as an operator, via the Ω-vector of A₁* A₂."""
    om = vacuum_vector(model)
    z = apply(adjoint(a1.operator(), model.space), apply(a2.operator(), om))
    gammaz = WickElement.from_vector(model, z).gamma()
    return gammaz.operator()


def biprocess_inner(u: BiProcess, v: BiProcess) -> QScalar:
    """∫ ⟪U(t), V(t)⟫ dt with ⟪A₁⊗B₁, A₂⊗B₂⟫ = phi[B₁* Γ_q(q)(A₁*A₂) B₂]."""
    model = u.model
    if v.model is not model:
        raise UsageError("bi-processes on different models")
    if u.decomposition() != v.decomposition():
        raise UsageError("bi-processes on different interval decompositions")
    ring = model.ring
    om = vacuum_vector(model)
    total = ring.zero()
    for ((a, b), upairs), (_, vpairs) in zip(u.pieces, v.pieces):
        width = ring.of(b - a)
        for a1, b1 in upairs:
            b1om = apply(b1.operator(), om)
            for a2, b2 in vpairs:
                g = _gamma_of_product(model, a1, a2)
                val = innerq(b1om, apply(g, apply(b2.operator(), om)))
                total = total + width * val
    return total


# ---------------------------------------------------------------------------
# traciality witness


def traciality_witness(model: ProcessModel, i: Interval, j: Interval,
                       k: int) -> tuple[QScalar, QScalar]:
    """(phi[X(I)X(J)X(I)X(J)Y_k(I)], phi[Y_k(I)X(I)X(J)X(I)X(J)]); for
    disjoint I, J these are q² r₂ r_{2+k} |I||J| and q r₂ r_{2+k} |I||J|,
    whose difference vanishes identically in q iff r_{2+k} = 0."""
    ai, bi = Fraction(i[0]), Fraction(i[1])
    aj, bj = Fraction(j[0]), Fraction(j[1])
    if max(ai, aj) < min(bi, bj):
        raise UsageError("intervals overlap")
    x_i = model.interval_letter(i).field()
    x_j = model.interval_letter(j).field()
    y_k = model.interval_letter(i, k).field()
    om = vacuum_vector(model)
    first = apply(FockOperator.compose([x_i, x_j, x_i, x_j, y_k]), om)
    second = apply(FockOperator.compose([y_k, x_i, x_j, x_i, x_j]), om)
    return first.vacuum_coefficient(), second.vacuum_coefficient()
