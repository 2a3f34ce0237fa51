"""Scalar arithmetic for the deformation parameter q.

Two modes coexist behind one type:

* exact mode: elements of the polynomial ring Q[q] with rational coefficients,
  used for every identity check;
* float mode: a real number together with the pinned rational value q0 that q
  was substituted with, used only for norm estimates and refinement
  experiments.

Values of different modes (or different pinned q0) never mix.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence, Union

from .errors import ModeMismatchError, UsageError

RationalLike = Union[int, Fraction]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise UsageError(f"not a rational value: {x!r}")


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    last = -1
    for i, c in enumerate(coeffs):
        if c != 0:
            last = i
    return tuple(coeffs[: last + 1])


class QScalar:
    """An element of Q[q] (exact) or a real number with a pinned q (float)."""

    __slots__ = ("coeffs", "q0", "val")

    def __init__(self, coeffs=None, q0=None, val=None):
        # Exact: coeffs is a trailing-zero-free tuple of Fractions, q0/val None.
        # Float: coeffs None, q0 a Fraction in (-1, 1), val a float.
        self.coeffs = coeffs
        self.q0 = q0
        self.val = val

    # -- constructors ------------------------------------------------------

    @staticmethod
    def exact(coeffs: Iterable[RationalLike]) -> "QScalar":
        return QScalar(coeffs=_trim([_as_fraction(c) for c in coeffs]))

    @staticmethod
    def exact_const(c: RationalLike) -> "QScalar":
        return QScalar.exact([c])

    @staticmethod
    def pinned(val: float, q0: RationalLike) -> "QScalar":
        q0 = _as_fraction(q0)
        if not (-1 < q0 < 1):
            raise UsageError(f"pinned q must lie in (-1, 1), got {q0}")
        return QScalar(q0=q0, val=float(val))

    # -- mode --------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.coeffs is not None

    def _join(self, other: "QScalar") -> None:
        if not isinstance(other, QScalar):
            raise ModeMismatchError(f"expected QScalar, got {type(other).__name__}")
        if self.is_exact != other.is_exact:
            raise ModeMismatchError("cannot mix exact and float q-scalars")
        if not self.is_exact and self.q0 != other.q0:
            raise ModeMismatchError(
                f"float q-scalars pinned at different q: {self.q0} vs {other.q0}"
            )

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "QScalar") -> "QScalar":
        self._join(other)
        if self.is_exact:
            a, b = self.coeffs, other.coeffs
            n = max(len(a), len(b))
            return QScalar(coeffs=_trim(
                [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                 for i in range(n)]))
        return QScalar(q0=self.q0, val=self.val + other.val)

    def __sub__(self, other: "QScalar") -> "QScalar":
        return self + (-other)

    def __neg__(self) -> "QScalar":
        if self.is_exact:
            return QScalar(coeffs=tuple(-c for c in self.coeffs))
        return QScalar(q0=self.q0, val=-self.val)

    def __mul__(self, other: "QScalar") -> "QScalar":
        self._join(other)
        if self.is_exact:
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return QScalar(coeffs=())
            out = [Fraction(0)] * (len(a) + len(b) - 1)
            for i, ca in enumerate(a):
                if ca:
                    for j, cb in enumerate(b):
                        if cb:
                            out[i + j] += ca * cb
            return QScalar(coeffs=_trim(out))
        return QScalar(q0=self.q0, val=self.val * other.val)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QScalar):
            return NotImplemented
        if self.is_exact != other.is_exact:
            return False
        if self.is_exact:
            return self.coeffs == other.coeffs
        return self.q0 == other.q0 and self.val == other.val

    def __hash__(self):
        if self.is_exact:
            return hash(("exact", self.coeffs))
        return hash(("float", self.q0, self.val))

    def __bool__(self) -> bool:
        return bool(self.coeffs) if self.is_exact else self.val != 0.0

    @property
    def is_zero(self) -> bool:
        return not self

    # -- evaluation / output ----------------------------------------------

    def eval_at(self, q0: RationalLike) -> "QScalar":
        """Substitute a pinned rational q into an exact scalar (float result)."""
        if not self.is_exact:
            raise UsageError("eval_at only applies to exact scalars")
        q0 = _as_fraction(q0)
        v = 0.0
        for c in reversed(self.coeffs):
            v = v * float(q0) + float(c)
        return QScalar.pinned(v, q0)

    def subs(self, q0: RationalLike) -> Fraction:
        """Substitute a rational q into an exact scalar, exactly."""
        if not self.is_exact:
            raise UsageError("subs only applies to exact scalars")
        q0 = _as_fraction(q0)
        v = Fraction(0)
        for c in reversed(self.coeffs):
            v = v * q0 + c
        return v

    def as_fraction(self) -> Fraction:
        """The value of a constant exact scalar."""
        if not self.is_exact:
            raise UsageError("as_fraction only applies to exact scalars")
        if len(self.coeffs) > 1:
            raise UsageError(f"not a constant: {self}")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __float__(self) -> float:
        if self.is_exact:
            if len(self.coeffs) > 1:
                raise UsageError("cannot coerce a non-constant polynomial to float")
            return float(self.coeffs[0]) if self.coeffs else 0.0
        return self.val

    def __str__(self) -> str:
        if not self.is_exact:
            return repr(self.val)
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                term = str(mag)
            else:
                var = "q" if i == 1 else f"q^{i}"
                term = var if mag == 1 else f"{mag}*{var}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c > 0 else f"- {term}")
        return " ".join(parts)

    __repr__ = __str__

    @staticmethod
    def parse(text: str) -> "QScalar":
        """Inverse of str() for exact scalars, e.g. "1 - 1/2*q + q^2"."""
        cleaned = text.replace("- ", "-").replace("+ ", "")
        coeffs: dict[int, Fraction] = {}
        for tok in cleaned.split():
            if "q" in tok:
                coef_s, _, var = tok.partition("q")
                power = int(var[1:]) if var.startswith("^") else 1
                coef_s = coef_s.rstrip("*")
                coef = Fraction(coef_s) if coef_s not in ("", "-") else Fraction(f"{coef_s}1")
            else:
                power, coef = 0, Fraction(tok)
            coeffs[power] = coeffs.get(power, Fraction(0)) + coef
        if not coeffs:
            return QScalar.exact([])
        return QScalar.exact([coeffs.get(i, Fraction(0))
                              for i in range(max(coeffs) + 1)])


class ScalarRing:
    """Factory for scalars of one consistent mode."""

    def __init__(self, q0: RationalLike | None = None):
        self.q0 = None if q0 is None else _as_fraction(q0)
        if self.q0 is not None and not (-1 < self.q0 < 1):
            raise UsageError(f"pinned q must lie in (-1, 1), got {self.q0}")

    @property
    def exact(self) -> bool:
        return self.q0 is None

    def zero(self) -> QScalar:
        return QScalar.exact([]) if self.exact else QScalar.pinned(0.0, self.q0)

    def one(self) -> QScalar:
        return self.of(1)

    def q(self) -> QScalar:
        return self.q_pow(1)

    def q_pow(self, k: int) -> QScalar:
        if k < 0:
            raise UsageError("negative q power")
        if self.exact:
            return QScalar.exact([0] * k + [1])
        return QScalar.pinned(float(self.q0) ** k, self.q0)

    def of(self, x: RationalLike) -> QScalar:
        x = _as_fraction(x)
        if self.exact:
            return QScalar.exact([x])
        return QScalar.pinned(float(x), self.q0)

    def __repr__(self):
        return "ScalarRing(exact)" if self.exact else f"ScalarRing(q0={self.q0})"

    def __eq__(self, other):
        return isinstance(other, ScalarRing) and self.q0 == other.q0

    def __hash__(self):
        return hash(("ScalarRing", self.q0))


EXACT = ScalarRing()


def q_int(n: int, ring: ScalarRing = EXACT) -> QScalar:
    """[n]_q = 1 + q + ... + q^(n-1), with [0]_q = 0."""
    if n < 0:
        raise UsageError("q_int needs n >= 0")
    if ring.exact:
        return QScalar.exact([1] * n)
    return QScalar.pinned(sum(float(ring.q0) ** k for k in range(n)), ring.q0)


def q_fact(n: int, ring: ScalarRing = EXACT) -> QScalar:
    """[n]_q! = [1]_q [2]_q ... [n]_q, with [0]_q! = 1."""
    if n < 0:
        raise UsageError("q_fact needs n >= 0")
    out = ring.one()
    for i in range(1, n + 1):
        out = out * q_int(i, ring)
    return out


def q_fact_ratio(n: int, k: int, ring: ScalarRing = EXACT) -> QScalar:
    """[n]_q! / [n-k]_q! computed as the product [n-k+1]_q ... [n]_q."""
    if not 0 <= k <= n:
        raise UsageError("need 0 <= k <= n")
    out = ring.one()
    for i in range(n - k + 1, n + 1):
        out = out * q_int(i, ring)
    return out


def inversions(sigma: Sequence[int]) -> int:
    """Number of pairs i < j with sigma(i) > sigma(j); sigma permutes 1..n."""
    n = len(sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise UsageError(f"not a permutation of 1..{n}: {sigma}")
    return sum(1 for i in range(n) for j in range(i + 1, n) if sigma[i] > sigma[j])


def sym_group(n: int):
    """All permutations of 1..n as tuples (identity first for n <= 1)."""
    return permutations(range(1, n + 1))
