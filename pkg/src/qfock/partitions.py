"""Set partitions, extended partitions and restricted-crossing statistics.

Blocks are always kept sorted and ordered by their least elements; every
statistic below operates on that canonical form.  An extended partition is a
partition together with a set of blocks regarded as "open on the left"; open
blocks survive as tensor factors in product expansions while closed blocks
contract to scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import UsageError
from .qscalar import inversions

MAX_ENUM_N = 12


@dataclass(frozen=True)
class SetPartition:
    """A partition of a ground set of consecutive integers lo..hi."""

    lo: int
    hi: int  # inclusive; ground set is {lo, ..., hi}
    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(blocks: Iterable[Iterable[int]], lo: int = 1, hi: int | None = None) -> "SetPartition":
        bs = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        elems = [e for b in bs for e in b]
        if not elems:
            raise UsageError("a partition needs at least one block")
        if len(set(elems)) != len(elems):
            raise UsageError("blocks are not disjoint")
        if hi is None:
            hi = max(elems)
        if sorted(elems) != list(range(lo, hi + 1)):
            raise UsageError(f"blocks do not cover {{{lo}..{hi}}}: {bs}")
        return SetPartition(lo, hi, bs)

    @property
    def n(self) -> int:
        return self.hi - self.lo + 1

    @property
    def size(self) -> int:
        return len(self.blocks)

    def block_of(self, k: int) -> tuple[int, ...]:
        for b in self.blocks:
            if k in b:
                return b
        raise UsageError(f"{k} not in ground set")

    def block_index_of(self, k: int) -> int:
        for i, b in enumerate(self.blocks):
            if k in b:
                return i
        raise UsageError(f"{k} not in ground set")

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def refines(self, other: "SetPartition") -> bool:
        """True if every block of self lies inside a block of other."""
        if (self.lo, self.hi) != (other.lo, other.hi):
            raise UsageError("partitions of different ground sets")
        owner = {e: i for i, b in enumerate(other.blocks) for e in b}
        return all(len({owner[e] for e in b}) == 1 for b in self.blocks)

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


@dataclass(frozen=True)
class ExtendedPartition:
    """A set partition with a distinguished set of left-open blocks."""

    pi: SetPartition
    open_blocks: frozenset[int]  # indices into pi.blocks

    @staticmethod
    def of(pi: SetPartition, open_blocks: Iterable[int] = ()) -> "ExtendedPartition":
        s = frozenset(open_blocks)
        if not s <= set(range(pi.size)):
            raise UsageError(f"open-block indices out of range: {sorted(s)}")
        return ExtendedPartition(pi, s)

    def __str__(self) -> str:
        return "".join(
            "{" + ",".join(map(str, b)) + "}" + ("*" if i in self.open_blocks else "")
            for i, b in enumerate(self.pi.blocks))

    @staticmethod
    def parse(text: str) -> "ExtendedPartition":
        blocks, opens = [], []
        rest = text.strip()
        while rest:
            if not rest.startswith("{"):
                raise UsageError(f"malformed partition text: {text!r}")
            body, sep, rest = rest[1:].partition("}")
            if not sep:
                raise UsageError(f"unclosed block in: {text!r}")
            if rest.startswith("*"):
                opens.append(len(blocks))
                rest = rest[1:]
            blocks.append([int(x) for x in body.split(",")])
        pi = SetPartition.of(blocks)
        return ExtendedPartition.of(pi, opens)


def enumerate_partitions(n: int) -> Iterator[SetPartition]:
    """All partitions of {1..n} in restricted-growth-string order, streamed."""
    if not 1 <= n <= MAX_ENUM_N:
        raise UsageError(f"enumerate_partitions supports 1 <= n <= {MAX_ENUM_N}")

    rgs = [0] * n

    def build() -> SetPartition:
        nblocks = max(rgs) + 1
        blocks: list[list[int]] = [[] for _ in range(nblocks)]
        for i, b in enumerate(rgs):
            blocks[b].append(i + 1)
        return SetPartition.of(blocks, hi=n)

    while True:
        yield build()
        # next restricted growth string
        for i in range(n - 1, 0, -1):
            if rgs[i] <= max(rgs[:i]):
                rgs[i] += 1
                for j in range(i + 1, n):
                    rgs[j] = 0
                break
        else:
            return


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def restrict(ep: ExtendedPartition, k: int, m: int) -> ExtendedPartition:
    """Restriction to {k..m}: trace of each block, open if it was open or
    reaches left of k."""
    if k > m:
        raise UsageError(f"empty or inverted restriction range [{k},{m}]")
    blocks, opens = [], []
    for i, b in enumerate(ep.pi.blocks):
        trace = tuple(e for e in b if k <= e <= m)
        if not trace:
            continue
        idx = len(blocks)
        blocks.append(trace)
        if i in ep.open_blocks or any(e < k for e in b):
            opens.append(idx)
    if not blocks:
        raise UsageError(f"restriction to [{k},{m}] is empty")
    # relabeling: ground set becomes the covered part of {k..m}; elements keep
    # their labels, which stay consecutive only when the trace covers k..m
    covered = sorted(e for b in blocks for e in b)
    pi = SetPartition(covered[0], covered[-1], tuple(sorted(blocks, key=lambda b: b[0])))
    # recompute open indices against the min-sorted order
    order = sorted(range(len(blocks)), key=lambda i: blocks[i][0])
    remap = {old: new for new, old in enumerate(order)}
    return ExtendedPartition(pi, frozenset(remap[i] for i in opens))


def _open_count_in_gap(ep: ExtendedPartition, lo: int, hi: int) -> int:
    """Number of blocks meeting {lo..hi} that are open there: in S, or
    reaching left of lo."""
    if lo > hi:
        return 0
    count = 0
    for i, b in enumerate(ep.pi.blocks):
        if any(lo <= e <= hi for e in b):
            if i in ep.open_blocks or any(e < lo for e in b):
                count += 1
    return count


def rc_at(ep: ExtendedPartition, k: int) -> int:
    """Right restricted crossings of (S, pi) at the point k."""
    b = ep.pi.block_of(k)
    if k == b[-1]:
        return 0
    j = min(e for e in b if e > k)
    return _open_count_in_gap(ep, k + 1, j - 1)


def rc(ep: ExtendedPartition) -> int:
    """Total number of right restricted crossings of an extended partition."""
    return sum(rc_at(ep, k) for k in range(ep.pi.lo, ep.pi.hi + 1))


def rc_plain(pi: SetPartition) -> int:
    """rc of the partition with no open blocks."""
    return rc(ExtendedPartition(pi, frozenset()))


def rc_alternative(ep: ExtendedPartition) -> int:
    """rc(S, pi) via rc(pi) plus, for each open block B, the number of blocks
    whose span strictly covers min(B)."""
    total = rc_plain(ep.pi)
    for i in ep.open_blocks:
        mb = ep.pi.blocks[i][0]
        total += sum(1 for c in ep.pi.blocks if c[0] < mb < c[-1])
    return total


@dataclass(frozen=True)
class Classification:
    is_noncrossing: bool
    singletons: tuple[tuple[int, ...], ...]
    pairs: tuple[tuple[int, ...], ...]
    inner_blocks: tuple[tuple[int, ...], ...] | None
    outer_blocks: tuple[tuple[int, ...], ...] | None


def classify(pi: SetPartition) -> Classification:
    """Noncrossing test, singleton/pair blocks, inner/outer split.

    Inner and outer blocks are only defined for noncrossing partitions; the
    fields are None otherwise and must not be requested.
    """
    noncrossing = rc_plain(pi) == 0
    singles = tuple(b for b in pi.blocks if len(b) == 1)
    pairs = tuple(b for b in pi.blocks if len(b) == 2)
    if not noncrossing:
        return Classification(False, singles, pairs, None, None)
    inner, outer = [], []
    for b in pi.blocks:
        covered = any(c[0] < b[0] and b[-1] < c[-1] for c in pi.blocks if c != b)
        (inner if covered else outer).append(b)
    return Classification(True, singles, pairs, tuple(inner), tuple(outer))


def inner_outer(pi: SetPartition) -> tuple[tuple, tuple]:
    cls = classify(pi)
    if not cls.is_noncrossing:
        raise UsageError(f"inner/outer undefined for crossing partition {pi}")
    return cls.inner_blocks, cls.outer_blocks


def is_pair_partition_kk(pi: SetPartition, k: int) -> bool:
    if pi.n != 2 * k or pi.lo != 1:
        return False
    return all(len(b) == 2 and b[0] <= k < b[1] for b in pi.blocks)


def induced_permutation(pi: SetPartition, k: int) -> tuple[int, ...]:
    """The permutation induced by a pair partition in Part2(k, k):
    sigma(i) = j - k where (k+1-i) is paired with j."""
    if not is_pair_partition_kk(pi, k):
        raise UsageError(f"{pi} is not a pair partition in Part2({k},{k})")
    partner = {}
    for a, b in pi.blocks:
        partner[a] = b
    sigma = tuple(partner[k + 1 - i] - k for i in range(1, k + 1))
    return sigma


def index_tuples(N: int, pi: SetPartition) -> Iterator[tuple[int, ...]]:
    """All tuples in {1..N}^n constant exactly on the blocks of pi (distinct
    values across blocks), streamed."""
    if N < 1:
        raise UsageError("need N >= 1")
    n, m = pi.n, pi.size
    owner = [pi.block_index_of(i) for i in range(pi.lo, pi.hi + 1)]

    def rec(assigned: list[int]):
        if len(assigned) == m:
            yield tuple(assigned[owner[i]] for i in range(n))
            return
        for v in range(1, N + 1):
            if v not in assigned:
                assigned.append(v)
                yield from rec(assigned)
                assigned.pop()

    yield from rec([])


def falling_factorial(N: int, m: int) -> int:
    out = 1
    for i in range(m):
        out *= N - i
    return out


def crossing_pairs(pi: SetPartition) -> int:
    """Independent crossing counter for pair partitions: number of pairs of
    blocks {a<b}, {c<d} with a < c < b < d."""
    if any(len(b) != 2 for b in pi.blocks):
        raise UsageError("crossing_pairs expects a pair partition")
    count = 0
    bs = pi.blocks
    for i in range(len(bs)):
        for j in range(len(bs)):
            if i != j:
                a, b = bs[i]
                c, d = bs[j]
                if a < c < b < d:
                    count += 1
    return count
