"""Parallel, checkpointed census of labeled families by isomorphism class.

A census maps each canonical representative to the number of labeled
families in its class and to the first of those in stream order.  That is all
the analysis needs: every predicate and cover value is invariant under
relabeling, so it is evaluated once per representative, and "first family in
enumeration order" is recovered from the stored first members.
"""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .checkpoint import CheckpointMismatchError, read_checkpoint, write_checkpoint
from .enumeration import (
    EnumerationCursor,
    EnumerationError,
    canonical_bitsets,
    check_n,
    choose_depth,
    order_key,
    sort_stream,
    subtree_families,
    subtree_prefixes,
)

log = logging.getLogger(__name__)

DEFAULT_SUBTREES = {1: 1, 2: 2, 3: 4, 4: 16, 5: 64}

ClassTable = dict[int, tuple[int, int]]


class RunInterrupted(RuntimeError):
    """Raised by ``stop_after``; the checkpoint holds all finished subtrees."""


@dataclass
class Census:
    n: int
    strategy: str
    classes: ClassTable

    @property
    def labeled_total(self) -> int:
        return sum(c for c, _ in self.classes.values())

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def representatives(self) -> list[int]:
        return sort_stream(self.classes, self.n)

    def __iter__(self) -> Iterator[tuple[int, int, int]]:
        """(representative, labeled count, first labeled bitset) in stream order."""
        for rep in self.representatives():
            count, first = self.classes[rep]
            yield rep, count, first


def census_part(n: int, strategy: str, prefixes: Sequence[Sequence[int]]) -> ClassTable:
    found: list[int] = []
    for p in prefixes:
        found.extend(subtree_families(n, p, strategy))
    if not found:
        return {}
    labeled = np.asarray(sort_stream(found, n), dtype=np.uint64)
    reps = canonical_bitsets(labeled, n)
    uniq, first_idx, counts = np.unique(reps, return_index=True, return_counts=True)
    return {int(r): (int(c), int(labeled[i])) for r, i, c in zip(uniq, first_idx, counts)}


def merge_classes(acc: ClassTable, part: ClassTable, n: int) -> None:
    for rep, (count, first) in part.items():
        if rep in acc:
            c0, f0 = acc[rep]
            if order_key(first, n) < order_key(f0, n):
                f0 = first
            acc[rep] = (c0 + count, f0)
        else:
            acc[rep] = (count, first)


def _job(n: int, strategy: str, depth: int, total: int) -> dict:
    return {"n": n, "strategy": strategy, "depth": depth, "subtrees": total}


def _payload(job: dict, prefixes: list, done: int, classes: ClassTable) -> dict:
    cursor = EnumerationCursor(job["n"], job["strategy"], tuple(prefixes[done:]) or ((),), 0)
    return {
        "job": job,
        "done": done,
        "token": cursor.resume_token if done < len(prefixes) else None,
        "classes": {str(rep): [c, f] for rep, (c, f) in sorted(classes.items())},
    }


def _restore(path, job: dict, prefixes: list) -> tuple[int, ClassTable]:
    payload = read_checkpoint(path, job["n"], job["strategy"])
    if payload.get("job") != job:
        raise CheckpointMismatchError(f"{path}: checkpoint job {payload.get('job')} differs from {job}")
    done = int(payload["done"])
    if payload["token"] is not None:
        cursor = EnumerationCursor.from_token(payload["token"])
        if list(cursor.subtrees) != prefixes[done:]:
            raise CheckpointMismatchError(f"{path}: resume token does not match subtree {done}")
    classes = {int(rep): (int(c), int(f)) for rep, (c, f) in payload["classes"].items()}
    return done, classes


def run_census(
    n: int,
    strategy: str = "recursive",
    workers: int = 1,
    checkpoint: str | os.PathLike | None = None,
    subtrees: int | None = None,
    checkpoint_every: int = 4,
    progress_interval: float = 5.0,
    stop_after: int | None = None,
) -> Census:
    """Enumerate every labeled family on n elements and group them by class.

    Work is split into search subtrees; results are merged in subtree order,
    whatever the worker count or completion order.  With ``checkpoint`` the
    merged state is saved every ``checkpoint_every`` subtrees and an existing
    checkpoint is resumed from.
    """
    check_n(n)
    if strategy == "filter" and n > 4:
        raise EnumerationError("filter strategy is a spot check only at n=5")
    target = subtrees or DEFAULT_SUBTREES[n]
    depth = choose_depth(n, target, strategy)
    prefixes = subtree_prefixes(n, depth, strategy)
    job = _job(n, strategy, depth, len(prefixes))

    done, classes = 0, {}
    if checkpoint is not None and os.path.exists(checkpoint):
        done, classes = _restore(checkpoint, job, prefixes)
        log.info("resuming n=%d at subtree %d/%d", n, done, len(prefixes))

    todo = prefixes[done:]
    args = [(n, strategy, [p]) for p in todo]
    last_report = time.monotonic()
    since_save = 0

    def results():
        if workers > 1 and len(args) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                yield from pool.map(census_part, *zip(*args))
        else:
            for a in args:
                yield census_part(*a)

    for part in results():
        merge_classes(classes, part, n)
        done += 1
        since_save += 1
        if checkpoint is not None and (since_save >= checkpoint_every or done == len(prefixes)):
            write_checkpoint(checkpoint, n, strategy, _payload(job, prefixes, done, classes))
            since_save = 0
        now = time.monotonic()
        if now - last_report >= progress_interval:
            log.info("n=%d: %d/%d subtrees, %d labeled families", n, done, len(prefixes),
                     sum(c for c, _ in classes.values()))
            last_report = now
        if stop_after is not None and done - (len(prefixes) - len(todo)) >= stop_after and done < len(prefixes):
            if checkpoint is not None:
                write_checkpoint(checkpoint, n, strategy, _payload(job, prefixes, done, classes))
            raise RunInterrupted(f"stopped after {done} of {len(prefixes)} subtrees")

    return Census(n, strategy, classes)


@lru_cache(maxsize=None)
def get_census(n: int, strategy: str = "recursive") -> Census:
    """Single-process census, memoised per (n, strategy)."""
    return run_census(n, strategy)
