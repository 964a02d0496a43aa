"""Ground sets, union-closed families and the separation/cover predicates.

Subsets of the ground set ``{0, ..., n-1}`` are plain ints (bit ``i`` set iff
element ``i`` is a member).  A family is additionally encoded, where speed
matters, as a "family bitset": an int with bit ``m`` set iff the subset with
mask ``m`` is a member.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

# Reporting type for extremal fractions.  Decisions never go through it; they
# use integer cross-multiplication (see ``meets_bound``).
ExactFraction = Fraction

WORD_BITS = 64
DEFAULT_MAX_N = 16
MAX_BOUND_K = 62
# Pattern tables hold 4**n bits per mask; beyond this the predicates loop.
PATTERN_TABLE_MAX_N = 8


class FamilyError(ValueError):
    """Raised for masks or families that violate ground-set or closure rules."""


@dataclass(frozen=True)
class GroundSet:
    n: int
    limit: int = field(default=DEFAULT_MAX_N, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.limit <= WORD_BITS:
            raise FamilyError(f"ground-set limit must be in 1..{WORD_BITS}, got {self.limit}")
        if not 1 <= self.n <= self.limit:
            raise FamilyError(f"ground size n={self.n} outside 1..{self.limit}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def fits(self, mask: int) -> bool:
        return 0 <= mask <= self.full

    def check(self, mask: int) -> int:
        if not self.fits(mask):
            raise FamilyError(f"mask {mask} does not fit ground set of size {self.n}")
        return mask


@dataclass(frozen=True)
class SeparationParams:
    k: int
    l: int

    def __post_init__(self) -> None:
        if not (isinstance(self.k, int) and isinstance(self.l, int)) or not self.k >= self.l >= 1:
            raise ValueError(f"need k >= l >= 1, got k={self.k}, l={self.l}")

    def __str__(self) -> str:
        return f"{self.k}|{self.l}"


@dataclass(frozen=True)
class Family:
    """A union-closed family containing the empty set and the full ground set."""

    ground: GroundSet
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        members = self.members
        if any(b <= a for a, b in zip(members, members[1:])):
            raise FamilyError("members must be strictly increasing")
        for m in members:
            self.ground.check(m)
        if not is_union_closed(members, self.ground):
            raise FamilyError(f"not a union-closed family on n={self.ground.n}: {format_family_masks(members)}")

    @classmethod
    def from_masks(cls, n: int | GroundSet, masks: Iterable[int]) -> Family:
        ground = n if isinstance(n, GroundSet) else GroundSet(n)
        return cls(ground, tuple(sorted(set(masks))))

    @classmethod
    def from_bits(cls, n: int, bits: int) -> Family:
        """Trusted constructor from a family bitset produced by the enumerator."""
        return _unchecked(GroundSet(n), tuple(iter_bits(bits)))

    @classmethod
    def powerset(cls, n: int) -> Family:
        ground = GroundSet(n)
        return _unchecked(ground, tuple(range(ground.full + 1)))

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def full(self) -> int:
        return self.ground.full

    @property
    def bits(self) -> int:
        out = 0
        for m in self.members:
            out |= 1 << m
        return out

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, mask: object) -> bool:
        return mask in self._member_set()

    def _member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def __str__(self) -> str:
        return format_family(self)


def _unchecked(ground: GroundSet, members: tuple[int, ...]) -> Family:
    f = object.__new__(Family)
    object.__setattr__(f, "ground", ground)
    object.__setattr__(f, "members", members)
    return f


# ---------------------------------------------------------------- bit helpers

def iter_bits(value: int) -> Iterator[int]:
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low


def k_subsets(n: int, k: int) -> Iterator[int]:
    """All k-subsets of ``{0..n-1}`` as masks, in increasing integer order."""
    if k < 0 or k > n:
        return
    if k == 0:
        yield 0
        return
    s = (1 << k) - 1
    limit = 1 << n
    while s < limit:
        yield s
        low = s & -s
        ripple = s + low
        s = (((ripple ^ s) >> 2) // low) | ripple


def submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def compress(mask: int, keep: int) -> int:
    """Pack the bits of ``mask`` at the positions of ``keep`` into the low bits."""
    out = 0
    j = 0
    for i in iter_bits(keep):
        if mask >> i & 1:
            out |= 1 << j
        j += 1
    return out


def expand(mask: int, keep: int) -> int:
    """Inverse of ``compress``: spread low bits onto the positions of ``keep``."""
    out = 0
    for j, i in enumerate(iter_bits(keep)):
        if mask >> j & 1:
            out |= 1 << i
    return out


def relabel_mask(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for i in iter_bits(mask):
        out |= 1 << perm[i]
    return out


def relabel(f: Family, perm: Sequence[int]) -> Family:
    """Image of ``f`` under the element relabeling ``i -> perm[i]``."""
    if sorted(perm) != list(range(f.n)):
        raise FamilyError(f"not a permutation of 0..{f.n - 1}: {perm!r}")
    return _unchecked(f.ground, tuple(sorted(relabel_mask(m, perm) for m in f.members)))


# ------------------------------------------------------------------- closure

def union_closure(seed_sets: Iterable[int], ground: GroundSet | int) -> Family:
    """Smallest union-closed family containing the seeds, the empty set and X."""
    if isinstance(ground, int):
        ground = GroundSet(ground)
    closed = {0, ground.full}
    pending = [ground.check(s) for s in seed_sets]
    while pending:
        s = pending.pop()
        if s in closed:
            continue
        new = [s | a for a in closed]
        closed.add(s)
        pending.extend(u for u in new if u not in closed)
    return _unchecked(ground, tuple(sorted(closed)))


def is_union_closed(members: Sequence[int], ground: GroundSet) -> bool:
    present = set(members)
    if 0 not in present or ground.full not in present:
        return False
    if any(not ground.fits(m) for m in members):
        return False
    ms = list(present)
    for i, a in enumerate(ms):
        for b in ms[i + 1:]:
            if a | b not in present:
                return False
    return True


# ---------------------------------------------------------------- separation

@lru_cache(maxsize=None)
def _pattern_tables(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Per mask A, the (L, R) pairs that A realises, as bits at index L << n | R.

    Strong: L is inside A and R avoids A.  Weak: L meets A and R avoids A,
    restricted to disjoint L, R.
    """
    full = (1 << n) - 1
    strong, weak = [], []
    for a in range(full + 1):
        outside = full & ~a
        s_bits = 0
        w_bits = 0
        for r in submasks(outside):
            for left in submasks(a):
                s_bits |= 1 << (left << n | r)
            for left in submasks(full & ~r):
                if left & a:
                    w_bits |= 1 << (left << n | r)
        strong.append(s_bits)
        weak.append(w_bits)
    return tuple(strong), tuple(weak)


@lru_cache(maxsize=None)
def pattern_target(n: int, k: int, l: int) -> int:
    """Bits for every disjoint (L, R) with |L| = l and |R| = k - l."""
    target = 0
    full = (1 << n) - 1
    for left in k_subsets(n, l):
        rest = full & ~left
        for r in k_subsets(n, k - l):
            if r & rest == r:
                target |= 1 << (left << n | r)
    return target


def realised_patterns(f: Family, weak: bool = False) -> int:
    strong_tab, weak_tab = _pattern_tables(f.n)
    table = weak_tab if weak else strong_tab
    out = 0
    for m in f.members:
        out |= table[m]
    return out


def _separated_loop(f: Family, p: SeparationParams, weak: bool) -> bool:
    full = f.full
    for left in k_subsets(f.n, p.l):
        if weak:
            cands = [full & ~a for a in f.members if a & left]
        else:
            cands = [full & ~a for a in f.members if a & left == left]
        rest = full & ~left
        for r in k_subsets(f.n, p.k - p.l):
            if r & rest != r:
                continue
            if not any(r & c == r for c in cands):
                return False
    return True


def _separated(f: Family, p: SeparationParams, weak: bool) -> bool:
    if f.n < p.k:
        return False
    if f.n <= PATTERN_TABLE_MAX_N:
        target = pattern_target(f.n, p.k, p.l)
        return target & ~realised_patterns(f, weak) == 0
    return _separated_loop(f, p, weak)


def is_separated(f: Family, p: SeparationParams) -> bool:
    """k|l-separation: every disjoint L (size l), R (size k-l) has a member
    containing L and missing R.  False whenever n < k."""
    return _separated(f, p, weak=False)


def is_weakly_separated(f: Family, p: SeparationParams) -> bool:
    """As ``is_separated`` but the member only has to meet L."""
    return _separated(f, p, weak=True)


# --------------------------------------------------------------------- cover

def cover_count(f: Family, s: int, l: int) -> int:
    f.ground.check(s)
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    return sum(1 for a in f.members if (a & s).bit_count() >= l)


def best_cover(f: Family, p: SeparationParams) -> tuple[int, int]:
    """The k-set S with the largest cover count (smallest mask on ties)."""
    if f.n < p.k:
        raise FamilyError(f"no {p.k}-subset of a {f.n}-element ground set")
    best_s, best = -1, -1
    for s in k_subsets(f.n, p.k):
        c = sum(1 for a in f.members if (a & s).bit_count() >= p.l)
        if c > best:
            best_s, best = s, c
    return best_s, best


def max_frequency(f: Family) -> tuple[int, int]:
    s, count = best_cover(f, SeparationParams(1, 1))
    return s.bit_length() - 1, count


@lru_cache(maxsize=None)
def bound_numerator(k: int, l: int) -> int:
    """sum_{i=l}^{k} C(k, i); the bound is this over 2**k."""
    SeparationParams(k, l)
    return sum(comb(k, i) for i in range(l, k + 1))


def conjecture_bound(p: SeparationParams) -> Fraction:
    if p.k > MAX_BOUND_K:
        raise ValueError(f"k={p.k} exceeds supported maximum {MAX_BOUND_K}")
    return Fraction(bound_numerator(p.k, p.l), 1 << p.k)


def meets_bound(count: int, size: int, p: SeparationParams) -> bool:
    """count / size >= bound(k, l), decided in integers."""
    return count << p.k >= size * bound_numerator(p.k, p.l)


# --------------------------------------------------------------- text format

_GROUND_RE = re.compile(r"^\s*n\s*=\s*(\d+)\s*[;:\s]\s*(.*)$")


def format_family_masks(members: Iterable[int]) -> str:
    return ",".join(str(m) for m in members)


def format_family(f: Family, with_ground: bool = False) -> str:
    body = format_family_masks(f.members)
    return f"n={f.n} {body}" if with_ground else body


def parse_mask(token: str) -> int:
    token = token.strip()
    value = int(token, 16) if token.lower().startswith("0x") else int(token, 10)
    if value < 0:
        raise FamilyError(f"negative mask {token!r}")
    return value


def parse_family(text: str, n: int | None = None) -> Family:
    """Parse ``"0,1,3"`` or ``"n=2 0,1,3"``; hex members (``0x3``) are accepted.

    Without an explicit ground size, n is read off the largest member, which
    must be the full set.
    """
    m = _GROUND_RE.match(text)
    if m:
        declared = int(m.group(1))
        if n is not None and n != declared:
            raise FamilyError(f"ground size mismatch: n={n} vs declared n={declared}")
        n, text = declared, m.group(2)
    try:
        masks = [parse_mask(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise FamilyError(f"unparseable family {text!r}") from exc
    if not masks:
        raise FamilyError("empty family text")
    if n is None:
        n = max(masks).bit_length()
    return Family.from_masks(n, masks)
