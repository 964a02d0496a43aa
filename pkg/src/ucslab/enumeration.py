"""Exhaustive generation of labeled union-closed families and their canonical forms.

Both strategies walk the proper nonempty masks in decreasing order and decide
membership one mask at a time; a decision prefix names a subtree of that
search.  ``recursive`` prunes a branch as soon as including a mask would need
an already-excluded union; ``filter`` tries every assignment of the free masks
and keeps the closed ones.

Streams come out in one fixed order: ascending member count, then
lexicographic on the sorted member masks.
"""
from __future__ import annotations

import base64
import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import Family, FamilyError, GroundSet, is_union_closed, iter_bits, relabel_mask

STRATEGIES = ("recursive", "filter")
MAX_ENUM_N = 5
FILTER_MAX_N = 4
CANONICAL_MAX_N = 8
TOKEN_VERSION = 1


class EnumerationError(ValueError):
    pass


def check_n(n: int, max_n: int = MAX_ENUM_N) -> None:
    if not 1 <= max_n <= MAX_ENUM_N:
        raise EnumerationError(f"configured maximum must be in 1..{MAX_ENUM_N}, got {max_n}")
    if not isinstance(n, int) or not 1 <= n <= max_n:
        raise EnumerationError(f"n={n} outside supported exhaustive range 1..{max_n}")


def _check_strategy(strategy: str) -> None:
    if strategy not in STRATEGIES:
        raise EnumerationError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def decision_masks(n: int) -> list[int]:
    full = (1 << n) - 1
    return list(range(full - 1, 0, -1))


# ------------------------------------------------------------ search subtrees

def _apply_prefix(n: int, prefix: Sequence[int]) -> tuple[int, list[int]] | None:
    """Replay branch decisions; None if the recursive search would prune them."""
    full = (1 << n) - 1
    fam = 1 | (1 << full)
    members = [full]
    for m, take in zip(decision_masks(n), prefix):
        if not take:
            continue
        for a in members:
            if not fam >> (a | m) & 1:
                return None
        members.append(m)
        fam |= 1 << m
    return fam, members


def _recursive_subtree(n: int, prefix: Sequence[int]) -> list[int]:
    masks = decision_masks(n)
    if len(prefix) > len(masks):
        raise EnumerationError(f"prefix longer than the {len(masks)} decisions for n={n}")
    start = _apply_prefix(n, prefix)
    if start is None:
        return []
    fam0, members = start
    out: list[int] = []
    depth = len(masks)

    def rec(i: int, fam: int) -> None:
        if i == depth:
            out.append(fam)
            return
        rec(i + 1, fam)
        m = masks[i]
        for a in members:
            if not fam >> (a | m) & 1:
                return
        members.append(m)
        rec(i + 1, fam | (1 << m))
        members.pop()

    rec(len(prefix), fam0)
    return out


def _filter_subtree(n: int, prefix: Sequence[int]) -> list[int]:
    masks = decision_masks(n)
    if len(prefix) > len(masks):
        raise EnumerationError(f"prefix longer than the {len(masks)} decisions for n={n}")
    ground = GroundSet(n)
    fixed = [0, ground.full] + [m for m, take in zip(masks, prefix) if take]
    free = masks[len(prefix):]
    out = []
    for choice in range(1 << len(free)):
        members = fixed + [free[j] for j in iter_bits(choice)]
        if is_union_closed(members, ground):
            bits = 0
            for m in members:
                bits |= 1 << m
            out.append(bits)
    return out


def subtree_families(n: int, prefix: Sequence[int], strategy: str = "recursive") -> list[int]:
    """Family bitsets in one subtree, in search order (not stream order)."""
    _check_strategy(strategy)
    if strategy == "recursive":
        return _recursive_subtree(n, prefix)
    return _filter_subtree(n, prefix)


def subtree_prefixes(n: int, depth: int, strategy: str = "recursive") -> list[tuple[int, ...]]:
    """Decision prefixes of the given depth, in search order.

    For ``recursive`` only prefixes that survive pruning are returned.
    """
    depth = min(depth, len(decision_masks(n)))
    prefixes: list[tuple[int, ...]] = [()]
    for _ in range(depth):
        nxt = []
        for p in prefixes:
            for take in (0, 1):
                q = p + (take,)
                if strategy == "filter" or _apply_prefix(n, q) is not None:
                    nxt.append(q)
        prefixes = nxt
    return prefixes


# ---------------------------------------------------------------- stream order

@lru_cache(maxsize=None)
def _byte_reverse_table() -> np.ndarray:
    return np.array([int(f"{b:08b}"[::-1], 2) for b in range(256)], dtype=np.uint64)


def reverse_bits_np(values: np.ndarray, width: int) -> np.ndarray:
    """Reverse the low ``width`` bits of each uint64 (width <= 64)."""
    table = _byte_reverse_table()
    values = values.astype(np.uint64, copy=False)
    out = np.zeros_like(values)
    for j in range(8):
        byte = (values >> np.uint64(8 * j)) & np.uint64(255)
        out |= table[byte] << np.uint64(8 * (7 - j))
    return out >> np.uint64(64 - width)


def lex_rank(bits: int, n: int) -> int:
    """Rank of a family bitset in lexicographic order of its sorted members."""
    width = 1 << n
    rev = int(format(bits, f"0{width}b")[::-1], 2)
    return ((1 << width) - 1) ^ rev


def order_key(bits: int, n: int) -> tuple[int, int]:
    return bits.bit_count(), lex_rank(bits, n)


def sort_stream(bits: Iterable[int], n: int) -> list[int]:
    arr = np.fromiter(bits, dtype=np.uint64)
    if arr.size == 0:
        return []
    width = 1 << n
    rank = reverse_bits_np(arr, width) ^ np.uint64((1 << width) - 1)
    order = np.lexsort((rank, np.bitwise_count(arr)))
    return [int(x) for x in arr[order]]


# --------------------------------------------------------------------- cursors

@dataclass
class EnumerationCursor:
    """A resumable stream over the union of some search subtrees.

    Consuming the cursor advances ``offset``; ``resume_token`` captures the
    subtrees and the offset, so a cursor rebuilt from it yields exactly the
    unconsumed suffix.
    """

    n: int
    strategy: str = "recursive"
    subtrees: tuple[tuple[int, ...], ...] = ((),)
    offset: int = 0
    _stream: list[int] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        check_n(self.n)
        _check_strategy(self.strategy)
        self.subtrees = tuple(tuple(int(d) for d in p) for p in self.subtrees)

    @property
    def resume_token(self) -> str:
        payload = {
            "v": TOKEN_VERSION,
            "n": self.n,
            "strategy": self.strategy,
            "subtrees": ["".join(map(str, p)) for p in self.subtrees],
            "offset": self.offset,
        }
        raw = json.dumps(payload, separators=(",", ":"), sort_keys=True).encode()
        return base64.urlsafe_b64encode(raw).decode("ascii")

    @classmethod
    def from_token(cls, token: str) -> EnumerationCursor:
        try:
            payload = json.loads(base64.urlsafe_b64decode(token.encode("ascii")))
            if payload["v"] != TOKEN_VERSION:
                raise EnumerationError(f"unsupported token version {payload['v']}")
            subtrees = tuple(tuple(int(c) for c in p) for p in payload["subtrees"])
            return cls(payload["n"], payload["strategy"], subtrees, int(payload["offset"]))
        except EnumerationError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise EnumerationError(f"malformed resume token: {exc}") from exc

    def bitsets(self) -> list[int]:
        """The full (unskipped) stream of this cursor as family bitsets."""
        if self._stream is None:
            found: list[int] = []
            for p in self.subtrees:
                found.extend(subtree_families(self.n, p, self.strategy))
            self._stream = sort_stream(found, self.n)
        return self._stream

    def __len__(self) -> int:
        return len(self.bitsets())

    def remaining_bitsets(self) -> list[int]:
        return self.bitsets()[self.offset:]

    def __iter__(self) -> Iterator[Family]:
        for bits in self.bitsets()[self.offset:]:
            self.offset += 1
            yield Family.from_bits(self.n, bits)


def enumerate_bitsets(n: int, strategy: str = "recursive", max_n: int = MAX_ENUM_N) -> list[int]:
    check_n(n, max_n)
    _check_strategy(strategy)
    if strategy == "filter" and n > FILTER_MAX_N:
        raise EnumerationError(
            f"full filter enumeration is limited to n <= {FILTER_MAX_N}; use spot_check_filter at n={n}"
        )
    return EnumerationCursor(n, strategy).bitsets()


def enumerate_families(n: int, strategy: str = "recursive", max_n: int = MAX_ENUM_N) -> Iterator[Family]:
    """Every union-closed family on n labeled elements, once each, in stream order."""
    for bits in enumerate_bitsets(n, strategy, max_n):
        yield Family.from_bits(n, bits)


def choose_depth(n: int, parts: int, strategy: str = "recursive") -> int:
    depth = 0
    limit = len(decision_masks(n))
    while depth < limit and len(subtree_prefixes(n, depth, strategy)) < parts:
        depth += 1
    return depth


def partition_search(n: int, parts: int, strategy: str = "recursive") -> list[EnumerationCursor]:
    """Split the search into ``parts`` disjoint cursors covering every family.

    Subtrees are dealt out in contiguous runs of search order.  When there are
    fewer subtrees than parts, the trailing cursors are empty.
    """
    if parts < 1:
        raise EnumerationError(f"parts must be >= 1, got {parts}")
    check_n(n)
    prefixes = subtree_prefixes(n, choose_depth(n, parts, strategy), strategy)
    chunks = [list(c) for c in np.array_split(np.arange(len(prefixes)), parts)]
    return [EnumerationCursor(n, strategy, tuple(prefixes[i] for i in idx)) for idx in chunks]


def spot_check_filter(n: int, samples: int, depth: int | None = None, seed: int = 0) -> list[tuple[int, ...]]:
    """Compare the two strategies on randomly drawn subtrees.

    Each sample fixes the top ``depth`` decisions at random (pruned prefixes
    included) and runs both strategies on the remaining masks.  Returns the
    prefixes on which they disagree.
    """
    check_n(n)
    masks = decision_masks(n)
    if depth is None:
        depth = max(0, len(masks) - 14)
    rng = random.Random(seed)
    bad = []
    for _ in range(samples):
        prefix = tuple(rng.randint(0, 1) for _ in range(depth))
        a = sort_stream(_recursive_subtree(n, prefix), n)
        b = sort_stream(_filter_subtree(n, prefix), n)
        if a != b:
            bad.append(prefix)
    return bad


# ---------------------------------------------------------------- canonical

@dataclass(frozen=True)
class CanonicalFamily:
    representative: Family
    orbit_size: int


def canonical_form(f: Family) -> CanonicalFamily:
    """Lexicographically least relabeling, with the size of its orbit."""
    n = f.n
    if n > CANONICAL_MAX_N:
        raise FamilyError(f"canonical form needs an n! scan; n={n} exceeds {CANONICAL_MAX_N}")
    best: tuple[int, ...] | None = None
    stabilizer = 0
    for perm in permutations(range(n)):
        image = tuple(sorted(relabel_mask(m, perm) for m in f.members))
        if image == f.members:
            stabilizer += 1
        if best is None or image < best:
            best = image
    rep = Family(f.ground, best)
    return CanonicalFamily(rep, factorial(n) // stabilizer)


@lru_cache(maxsize=None)
def _relabel_byte_tables(n: int) -> np.ndarray:
    """tables[p, j, b]: reversed-bit image of byte ``b`` at byte position ``j``
    of a family bitset under the p-th permutation."""
    width = 1 << n
    nbytes = (width + 7) // 8
    perms = list(permutations(range(n)))
    tables = np.zeros((len(perms), nbytes, 256), dtype=np.uint64)
    for p, perm in enumerate(perms):
        image = [relabel_mask(m, perm) for m in range(width)]
        for j in range(nbytes):
            for b in range(256):
                v = 0
                for t in iter_bits(b):
                    m = 8 * j + t
                    if m < width:
                        v |= 1 << (width - 1 - image[m])
                tables[p, j, b] = v
    return tables


def canonical_bitsets(bits: np.ndarray | Sequence[int], n: int) -> np.ndarray:
    """Vectorized canonical representative (as family bitset) for each input."""
    check_n(n)
    arr = np.asarray(bits, dtype=np.uint64)
    width = 1 << n
    tables = _relabel_byte_tables(n)
    best = np.zeros(arr.shape, dtype=np.uint64)
    bytes_ = [(arr >> np.uint64(8 * j)) & np.uint64(255) for j in range(tables.shape[1])]
    for p in range(tables.shape[0]):
        acc = np.zeros(arr.shape, dtype=np.uint64)
        for j, b in enumerate(bytes_):
            acc |= tables[p, j][b]
        np.maximum(best, acc, out=best)
    # max of the reversed image is the lexicographically least member sequence
    return reverse_bits_np(best, width)


def enumerate_canonical(n: int) -> Iterator[CanonicalFamily]:
    """One representative per isomorphism class, in stream order of the representatives."""
    check_n(n)
    labeled = np.asarray(enumerate_bitsets(n), dtype=np.uint64)
    reps, counts = np.unique(canonical_bitsets(labeled, n), return_counts=True)
    orbit = {int(r): int(c) for r, c in zip(reps, counts)}
    for bits in sort_stream(orbit, n):
        yield CanonicalFamily(Family.from_bits(n, bits), orbit[bits])
