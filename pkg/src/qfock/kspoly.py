"""Orthogonalization polynomials for power processes.

A_u expresses the orthogonalized process Yhat_u as a noncommutative polynomial
in the power variables x_1, x_2, ...; substituting x_j -> Y_j(I) recovers the
operator identities.  The one-variable degenerations are the continuous
q-Hermite and the centered q-Charlier families.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .errors import ResourceBudgetError, UsageError
from .fock import FockOperator
from .model import MomentSequence, monic_op_coefficients
from .qscalar import EXACT, QScalar, ScalarRing, q_fact_ratio, q_int

MAX_KS_LEN = 8
MAX_ROW_N = 6
MAX_OP_DEGREE = 20

Word = tuple[int, ...]


class NCPolynomial:
    """A noncommutative polynomial in variables x_1, x_2, ... over the scalar
    ring; words are tuples of variable indices."""

    def __init__(self, ring: ScalarRing, terms: dict[Word, QScalar] | None = None):
        self.ring = ring
        self.terms: dict[Word, QScalar] = {}
        if terms:
            for w, c in terms.items():
                if any(j < 1 for j in w):
                    raise UsageError(f"variable indices start at 1: {w}")
                if not c.is_zero:
                    self.terms[tuple(w)] = c

    @staticmethod
    def zero(ring: ScalarRing) -> "NCPolynomial":
        return NCPolynomial(ring)

    @staticmethod
    def one(ring: ScalarRing) -> "NCPolynomial":
        return NCPolynomial(ring, {(): ring.one()})

    @staticmethod
    def x(j: int, ring: ScalarRing) -> "NCPolynomial":
        return NCPolynomial(ring, {(j,): ring.one()})

    @staticmethod
    def const(c, ring: ScalarRing) -> "NCPolynomial":
        c = c if isinstance(c, QScalar) else ring.of(c)
        return NCPolynomial(ring, {(): c})

    def __add__(self, other: "NCPolynomial") -> "NCPolynomial":
        out = dict(self.terms)
        for w, c in other.terms.items():
            cur = out.get(w)
            out[w] = c if cur is None else cur + c
        return NCPolynomial(self.ring, out)

    def __sub__(self, other: "NCPolynomial") -> "NCPolynomial":
        return self + other.scale(self.ring.of(-1))

    def __mul__(self, other: "NCPolynomial") -> "NCPolynomial":
        out: dict[Word, QScalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                cur = out.get(w)
                out[w] = c if cur is None else cur + c
        return NCPolynomial(self.ring, out)

    def scale(self, c: QScalar) -> "NCPolynomial":
        return NCPolynomial(self.ring, {w: cc * c for w, cc in self.terms.items()})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, NCPolynomial) and self.ring == other.ring
                and self.terms == other.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            mono = " ".join(f"x{j}" for j in w) or "1"
            parts.append(f"({self.terms[w]}) · {mono}")
        return " + ".join(parts)

    __repr__ = __str__

    def evaluate(self, var: Callable[[int], FockOperator]) -> FockOperator:
        """Substitute operators for the variables (order-preserving)."""
        terms = []
        for w, c in self.terms.items():
            if w:
                terms.append(FockOperator.compose([var(j) for j in w]).scale(c))
            else:
                terms.append(FockOperator.scalar(c))
        if not terms:
            return FockOperator.scalar(self.ring.zero())
        return FockOperator.opsum(terms)

    def eval_scalar(self, values: Callable[[int], QScalar]) -> QScalar:
        """Substitute scalars (only meaningful when evaluation commutes)."""
        total = self.ring.zero()
        for w, c in self.terms.items():
            for j in w:
                c = c * values(j)
            total = total + c
        return total


# ---------------------------------------------------------------------------
# the orthogonalization recursion


def ks_poly(u: Sequence[int], moments: MomentSequence,
            ring: ScalarRing = EXACT) -> NCPolynomial:
    """A_u by the recursion

        A_(j,u) = x_j A_u - Σ_i q^{i-1} r_{j+u(i)} A_{u∖u(i)}
                          - Σ_i q^{i-1} A_{(j+u(i), u∖u(i))},

    with A_∅ = 1 and A_(j) = x_j."""
    u = tuple(u)
    if any(j < 1 for j in u):
        raise UsageError(f"power indices must be >= 1: {u}")
    if len(u) > MAX_KS_LEN:
        raise ResourceBudgetError(f"ks_poly capped at length {MAX_KS_LEN}")
    memo: dict[Word, NCPolynomial] = {}

    def rec(word: Word) -> NCPolynomial:
        got = memo.get(word)
        if got is not None:
            return got
        if not word:
            out = NCPolynomial.one(ring)
        else:
            j, rest = word[0], word[1:]
            out = NCPolynomial.x(j, ring) * rec(rest)
            for i, ui in enumerate(rest):
                removed = rest[:i] + rest[i + 1:]
                qc = ring.q_pow(i)
                out = out - rec(removed).scale(
                    qc * ring.of(moments.r_at(j + ui)))
                out = out - rec((j + ui,) + removed).scale(qc)
        memo[word] = out
        return out

    return rec(u)


def ks_row_formula(j: int, n: int, moments: MomentSequence,
                   ring: ScalarRing = EXACT) -> NCPolynomial:
    """The closed form of A_(j,1,...,1) with n trailing ones:

        x_j A^(n) + Σ_{k=1}^n (-1)^k ([n]_q!/[n-k]_q!) (x_{j+k} + r_{j+k}) A^(n-k),

    where A^(m) = A_(1,...,1) on m ones."""
    if n > MAX_ROW_N:
        raise ResourceBudgetError(f"ks_row_formula capped at n = {MAX_ROW_N}")
    a = {m: ks_poly((1,) * m, moments, ring) for m in range(n + 1)}
    out = NCPolynomial.x(j, ring) * a[n]
    for k in range(1, n + 1):
        coeff = q_fact_ratio(n, k, ring)
        if k % 2:
            coeff = -coeff
        bracket = (NCPolynomial.x(j + k, ring)
                   + NCPolynomial.const(moments.r_at(j + k), ring))
        out = out + (bracket * a[n - k]).scale(coeff)
    return out


# ---------------------------------------------------------------------------
# one-variable degenerations


def q_hermite(n: int, ring: ScalarRing = EXACT) -> NCPolynomial:
    """H_0 = 1, H_1 = x, H_{n+1} = x H_n - [n]_q H_{n-1}."""
    if not 0 <= n <= MAX_OP_DEGREE:
        raise ResourceBudgetError(f"q_hermite capped at degree {MAX_OP_DEGREE}")
    h_prev, h = NCPolynomial.one(ring), NCPolynomial.x(1, ring)
    if n == 0:
        return h_prev
    for m in range(1, n):
        h_prev, h = h, NCPolynomial.x(1, ring) * h - h_prev.scale(q_int(m, ring))
    return h


def q_charlier(n: int, ring: ScalarRing = EXACT) -> NCPolynomial:
    """C_0 = 1, C_1 = x, C_{n+1} = x C_n - [n]_q C_n - [n]_q C_{n-1}."""
    if not 0 <= n <= MAX_OP_DEGREE:
        raise ResourceBudgetError(f"q_charlier capped at degree {MAX_OP_DEGREE}")
    c_prev, c = NCPolynomial.one(ring), NCPolynomial.x(1, ring)
    if n == 0:
        return c_prev
    for m in range(1, n):
        qm = q_int(m, ring)
        c_prev, c = c, (NCPolynomial.x(1, ring) * c - c.scale(qm)
                        - c_prev.scale(qm))
    return c


def monic_op_poly(moments: MomentSequence, degree: int,
                  ring: ScalarRing = EXACT) -> NCPolynomial:
    """The monic polynomial of the given degree orthogonal under the canonical
    measure, as a polynomial in x_1."""
    coeffs = monic_op_coefficients(moments, degree)
    out = NCPolynomial.zero(ring)
    for k, c in enumerate(coeffs):
        if c:
            out = out + NCPolynomial(ring, {(1,) * k: ring.of(c)})
    return out
