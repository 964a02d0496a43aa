import random
from itertools import permutations
from math import factorial

import numpy as np
import pytest

import oracles
from ucslab.core import Family, is_union_closed, relabel, union_closure
from ucslab.enumeration import (
    CanonicalFamily,
    EnumerationCursor,
    EnumerationError,
    canonical_bitsets,
    canonical_form,
    enumerate_bitsets,
    enumerate_canonical,
    enumerate_families,
    lex_rank,
    order_key,
    partition_search,
    sort_stream,
    spot_check_filter,
    subtree_prefixes,
)

# labeled counts from the filter oracle (tests/oracles.py); n=5 from the census
LABELED = {1: 1, 2: 4, 3: 45, 4: 2271}
CLASSES = {1: 1, 2: 3, 3: 14, 4: 165}


def stream_key(f):
    return len(f), f.members


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_counts_match_filter_oracle(n, oracle_families):
    assert len(oracle_families[n]) == LABELED[n]
    assert len(enumerate_bitsets(n, "recursive")) == LABELED[n]
    assert len(enumerate_bitsets(n, "filter")) == LABELED[n]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_strategies_identical_streams(n, oracle_families):
    rec = list(enumerate_families(n, "recursive"))
    fil = list(enumerate_families(n, "filter"))
    assert rec == fil
    assert [stream_key(f) for f in rec] == sorted(stream_key(f) for f in rec)
    assert {f.members for f in rec} == {tuple(oracles.to_masks(s)) for s in oracle_families[n]}
    assert all(is_union_closed(f.members, f.ground) for f in rec)


def test_small_streams_literal():
    assert [f.members for f in enumerate_families(1)] == [(0, 1)]
    assert [f.members for f in enumerate_families(2)] == [(0, 3), (0, 1, 3), (0, 2, 3), (0, 1, 2, 3)]


def test_range_errors():
    with pytest.raises(EnumerationError):
        enumerate_bitsets(0)
    with pytest.raises(EnumerationError):
        enumerate_bitsets(6)
    with pytest.raises(EnumerationError):
        enumerate_bitsets(5, "filter")
    with pytest.raises(EnumerationError):
        enumerate_bitsets(3, "sideways")
    with pytest.raises(EnumerationError):
        enumerate_bitsets(4, max_n=3)


def test_order_key_is_lexicographic():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(1, 5)
        a = sorted(set([0, (1 << n) - 1] + rng.sample(range(1 << n), rng.randint(0, 1 << n))))
        b = sorted(set([0, (1 << n) - 1] + rng.sample(range(1 << n), len(a) - 2)))
        ba, bb = sum(1 << m for m in a), sum(1 << m for m in b)
        if len(a) == len(b):
            assert (lex_rank(ba, n) < lex_rank(bb, n)) == (a < b)
        assert (order_key(ba, n) < order_key(bb, n)) == ((len(a), a) < (len(b), b))
    bits = [rng.getrandbits(32) for _ in range(500)]
    assert sort_stream(bits, 5) == sorted(bits, key=lambda x: order_key(x, 5))


def test_spot_check_filter_n5():
    assert spot_check_filter(5, samples=6, depth=17, seed=11) == []


def test_spot_check_filter_small_n_full_depth():
    for n in (2, 3, 4):
        assert spot_check_filter(n, samples=4, depth=0, seed=n) == []


# ------------------------------------------------------------ partitioning

def test_partition_single_part():
    (cur,) = partition_search(3, 1)
    assert cur.remaining_bitsets() == enumerate_bitsets(3)


@pytest.mark.parametrize("n,parts", [(3, 4), (4, 3), (4, 16), (2, 7), (1, 3)])
@pytest.mark.parametrize("strategy", ["recursive", "filter"])
def test_partition_multiset_equality(n, parts, strategy):
    cursors = partition_search(n, parts, strategy)
    assert len(cursors) == parts
    full = enumerate_bitsets(n)
    pos = {b: i for i, b in enumerate(full)}
    union = []
    for c in cursors:
        part = c.bitsets()
        idx = [pos[b] for b in part]
        assert idx == sorted(idx)  # order within each part preserved
        union.extend(part)
    assert sorted(union) == sorted(full)
    assert len(union) == len(set(union)) == len(full)


def test_cursor_resume_suffix():
    for cur in partition_search(4, 3):
        stream = cur.bitsets()
        half = len(stream) // 2
        it = iter(cur)
        taken = [next(it).bits for _ in range(half)]
        assert taken == stream[:half]
        token = cur.resume_token
        resumed = EnumerationCursor.from_token(token)
        assert resumed.offset == half
        assert [f.bits for f in resumed] == stream[half:]
        assert EnumerationCursor.from_token(token).resume_token == token


def test_token_errors():
    with pytest.raises(EnumerationError):
        EnumerationCursor.from_token("not-a-token")
    cur = EnumerationCursor(3, "filter", ((1, 0),), 2)
    assert EnumerationCursor.from_token(cur.resume_token) == cur


def test_subtree_prefixes_pruned():
    # recursive prefixes are those the pruning keeps, a subset of all 2**d
    rec = subtree_prefixes(4, 6)
    fil = subtree_prefixes(4, 6, "filter")
    assert set(rec) <= set(fil) and len(fil) == 64
    assert len(rec) < 64


# --------------------------------------------------------------- canonical

def test_canonical_examples():
    c = canonical_form(Family.from_masks(2, [0, 2, 3]))
    assert c == CanonicalFamily(Family.from_masks(2, [0, 1, 3]), 2)
    for n in range(1, 6):
        c = canonical_form(Family.powerset(n))
        assert c.representative == Family.powerset(n) and c.orbit_size == 1
    c = canonical_form(Family.powerset(2))
    assert c.orbit_size == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_canonical_classes_match_oracle(n, oracle_families):
    classes = list(enumerate_canonical(n))
    assert len(classes) == CLASSES[n]
    assert sum(c.orbit_size for c in classes) == LABELED[n]
    expected = {}
    for sets in oracle_families[n]:
        key = oracles.canonical(sets, n)
        expected[key] = expected.get(key, 0) + 1
    assert {c.representative.members: c.orbit_size for c in classes} == expected
    reps = [c.representative for c in classes]
    assert [stream_key(f) for f in reps] == sorted(stream_key(f) for f in reps)


def test_enumerate_canonical_n2_orbits():
    assert [c.orbit_size for c in enumerate_canonical(2)] == [1, 2, 1]


@pytest.mark.parametrize("n", [3, 4])
def test_vectorized_canonical_agrees_with_scan(n):
    bits = enumerate_bitsets(n)
    reps = canonical_bitsets(bits, n)
    for b, r in zip(bits, reps):
        c = canonical_form(Family.from_bits(n, b))
        assert c.representative.bits == int(r)


def test_canonical_idempotent_and_orbit_constant():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(2, 6)
        f = union_closure(rng.sample(range(1 << n), rng.randint(0, min(5, 1 << n))), n)
        c = canonical_form(f)
        assert canonical_form(c.representative).representative == c.representative
        perm = list(range(n))
        rng.shuffle(perm)
        assert canonical_form(relabel(f, perm)) == c
        orbit = {relabel(f, p).members for p in permutations(range(n))}
        assert len(orbit) == c.orbit_size
        assert factorial(n) % c.orbit_size == 0


def test_canonical_rejects_large_n():
    f = union_closure([], 9)
    with pytest.raises(Exception):
        canonical_form(f)
    assert canonical_bitsets(np.array([], dtype=np.uint64), 3).size == 0
