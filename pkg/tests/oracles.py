"""Brute-force reference implementations on frozensets.

Nothing here imports the package; every function follows the literal
definition (ordered k-tuples, pairwise-union fixpoints, explicit listing).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import chain, combinations, permutations
from math import comb


def powerset(xs):
    xs = list(xs)
    return [frozenset(c) for c in chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))]


def to_sets(masks):
    return {frozenset(i for i in range(64) if m >> i & 1) for m in masks}


def to_masks(sets):
    return sorted(sum(1 << i for i in s) for s in sets)


def closure(seeds, n):
    fam = {frozenset(), frozenset(range(n))} | {frozenset(s) for s in seeds}
    while True:
        new = {a | b for a in fam for b in fam} - fam
        if not new:
            return fam
        fam |= new


def closed(fam, n):
    if frozenset() not in fam or frozenset(range(n)) not in fam:
        return False
    return all(a | b in fam for a in fam for b in fam)


def all_families(n):
    """Filter oracle: every subset of the proper nonempty subsets, kept if closed."""
    ground = frozenset(range(n))
    proper = [s for s in powerset(range(n)) if s and s != ground]
    out = []
    for r in range(len(proper) + 1):
        for choice in combinations(proper, r):
            fam = {frozenset(), ground, *choice}
            if closed(fam, n):
                out.append(frozenset(fam))
    return out


def separated(fam, n, k, l, weak=False):
    if n < k:
        return False
    for xs in permutations(range(n), k):
        first, rest = set(xs[:l]), set(xs[l:])
        if weak:
            ok = any(a & first and not a & rest for a in fam)
        else:
            ok = any(first <= a and not a & rest for a in fam)
        if not ok:
            return False
    return True


def cover(fam, s, l):
    return sum(1 for a in fam if len(a & s) >= l)


def best_fraction(fam, n, k, l):
    return max(Fraction(cover(fam, frozenset(s), l), len(fam)) for s in combinations(range(n), k))


def bound(k, l):
    return Fraction(sum(comb(k, i) for i in range(l, k + 1)), 2 ** k)


def relabel(fam, perm):
    return frozenset(frozenset(perm[i] for i in a) for a in fam)


def canonical(fam, n):
    return min(tuple(to_masks(relabel(fam, p))) for p in permutations(range(n)))
