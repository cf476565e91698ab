"""Finite frame enumeration with isomorphism pruning.

Frames on ``n`` worlds are encoded as relation masks: bit ``i*n + j`` is
set iff world ``i`` sees world ``j``.  ``iter_frames`` yields, in
ascending mask order, one representative per isomorphism class whenever
the class/size combination is small enough to canonicalise (canonical
form: the lexicographically minimal mask over all world permutations);
for the very large combinations it falls back to plain labeled
enumeration.  Transitive frames at five worlds are generated from
preorders (a transitive relation is a preorder minus loops at worlds
whose strongly connected component is a singleton), which avoids
touching the 2^25 labeled candidates.
"""

from __future__ import annotations

from itertools import permutations
from typing import Iterator

import numpy as np

from .kripke import FrameClass

MAX_WORLDS = 5

_cache: dict[tuple[str, int], tuple[int, ...]] = {}


def mask_to_rel(mask: int, n: int) -> frozenset[tuple[str, str]]:
    return frozenset(
        (f"w{i}", f"w{j}") for i in range(n) for j in range(n) if mask >> (i * n + j) & 1
    )


def rel_to_mask(rel: frozenset[tuple[str, str]], n: int) -> int:
    mask = 0
    for a, b in rel:
        mask |= 1 << (int(a[1:]) * n + int(b[1:]))
    return mask


def mask_successors(mask: int, n: int) -> list[list[int]]:
    return [[j for j in range(n) if mask >> (i * n + j) & 1] for i in range(n)]


def iter_frames(cls: FrameClass, n: int) -> Iterator[int]:
    """Yield relation masks for the class, smallest first."""
    if not 1 <= n <= MAX_WORLDS:
        raise ValueError(f"frame enumeration supports 1..{MAX_WORLDS} worlds, got {n}")
    key = (cls.value, n)
    if key in _cache:
        yield from _cache[key]
        return
    if n <= 4 or cls in (FrameClass.KB, FrameClass.B, FrameClass.S5, FrameClass.S4,
                         FrameClass.K4, FrameClass.T):
        masks = _materialize(cls, n)
        _cache[key] = masks
        yield from masks
        return
    # K and D at five worlds: labeled, chunked, no isomorphism pruning.
    yield from _iter_labeled_chunked(cls, n)


def _materialize(cls: FrameClass, n: int) -> tuple[int, ...]:
    if n <= 4:
        masks = np.arange(1 << (n * n), dtype=np.int64)
        masks = _filter_class(masks, n, cls)
    elif cls in (FrameClass.KB, FrameClass.B, FrameClass.S5):
        masks = _symmetric_masks(n, reflexive=cls in (FrameClass.B, FrameClass.S5))
        if cls is FrameClass.S5:
            masks = masks[_transitive_ok(masks, n)]
    elif cls in (FrameClass.S4, FrameClass.T):
        masks = _reflexive_masks(n)
        if cls is FrameClass.S4:
            masks = masks[_transitive_ok(masks, n)]
    elif cls is FrameClass.K4:
        return _transitive_reps(n)
    else:
        raise AssertionError(cls)
    if len(masks) <= 200_000:
        masks = _canonical_reps(masks, n)
    return tuple(int(m) for m in np.sort(masks))


def _iter_labeled_chunked(cls: FrameClass, n: int) -> Iterator[int]:
    total = 1 << (n * n)
    chunk = 1 << 20
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        for m in _filter_class(masks, n, cls):
            yield int(m)


# ---------------------------------------------------------------------------
# Vectorized condition filters
# ---------------------------------------------------------------------------

def _bit(masks: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    return (masks >> (i * n + j)) & 1


def _filter_class(masks: np.ndarray, n: int, cls: FrameClass) -> np.ndarray:
    keep = np.ones(len(masks), dtype=bool)
    conditions = cls.conditions
    if "reflexive" in conditions:
        diag = sum(1 << (i * n + i) for i in range(n))
        keep &= (masks & diag) == diag
    if "serial" in conditions:
        row = (1 << n) - 1
        for i in range(n):
            keep &= ((masks >> (i * n)) & row) != 0
    if "symmetric" in conditions:
        for i in range(n):
            for j in range(i + 1, n):
                keep &= _bit(masks, n, i, j) == _bit(masks, n, j, i)
    masks = masks[keep]
    if "transitive" in conditions:
        masks = masks[_transitive_ok(masks, n)]
    return masks


def _transitive_ok(masks: np.ndarray, n: int) -> np.ndarray:
    ok = np.ones(len(masks), dtype=bool)
    for i in range(n):
        for j in range(n):
            bij = _bit(masks, n, i, j) == 1
            for k in range(n):
                bad = bij & (_bit(masks, n, j, k) == 1) & (_bit(masks, n, i, k) == 0)
                ok &= ~bad
    return ok


def _symmetric_masks(n: int, reflexive: bool) -> np.ndarray:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    loops = [] if reflexive else list(range(n))
    free = len(pairs) + len(loops)
    idx = np.arange(1 << free, dtype=np.int64)
    masks = np.zeros(len(idx), dtype=np.int64)
    for b, (i, j) in enumerate(pairs):
        on = (idx >> b) & 1
        masks |= on << (i * n + j)
        masks |= on << (j * n + i)
    for b, i in enumerate(loops):
        masks |= ((idx >> (len(pairs) + b)) & 1) << (i * n + i)
    if reflexive:
        masks |= sum(1 << (i * n + i) for i in range(n))
    return masks


def _reflexive_masks(n: int) -> np.ndarray:
    offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
    idx = np.arange(1 << len(offdiag), dtype=np.int64)
    masks = np.full(len(idx), sum(1 << (i * n + i) for i in range(n)), dtype=np.int64)
    for b, (i, j) in enumerate(offdiag):
        masks |= ((idx >> b) & 1) << (i * n + j)
    return masks


# ---------------------------------------------------------------------------
# Isomorphism pruning
# ---------------------------------------------------------------------------

def _apply_perm(masks: np.ndarray, n: int, perm: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(len(masks), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            out |= _bit(masks, n, perm[i], perm[j]) << (i * n + j)
    return out


def _canonical_reps(masks: np.ndarray, n: int) -> np.ndarray:
    if len(masks) == 0:
        return masks
    canon = masks.copy()
    for perm in permutations(range(n)):
        np.minimum(canon, _apply_perm(masks, n, perm), out=canon)
    return np.unique(canon)


# ---------------------------------------------------------------------------
# Transitive frames at five worlds, via preorders
# ---------------------------------------------------------------------------

def _transitive_reps(n: int) -> tuple[int, ...]:
    reflexive = _reflexive_masks(n)
    preorders = _canonical_reps(reflexive[_transitive_ok(reflexive, n)], n)
    out: set[int] = set()
    for q in preorders:
        q = int(q)
        auts = [p for p in permutations(range(n))
                if int(_apply_perm(np.array([q], dtype=np.int64), n, p)[0]) == q]
        removable = [i for i in range(n)
                     if not any(j != i and q >> (i * n + j) & 1 and q >> (j * n + i) & 1
                                for j in range(n))]
        seen: set[tuple[int, ...]] = set()
        for choice in range(1 << len(removable)):
            subset = [removable[b] for b in range(len(removable)) if choice >> b & 1]
            orbit_min = min(tuple(sorted(p.index(i) for i in subset)) for p in auts)
            if orbit_min in seen:
                continue
            seen.add(orbit_min)
            mask = q
            for i in subset:
                mask &= ~(1 << (i * n + i))
            out.add(mask)
    reps = _canonical_reps(np.array(sorted(out), dtype=np.int64), n)
    return tuple(int(m) for m in reps)
