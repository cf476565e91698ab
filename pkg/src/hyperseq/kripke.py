"""Two-valued Kripke semantics and the bounded semantic oracle.

A hypersequent is countermodelled along a *branch*: a sequence of
R-related points, one per component, where every antecedent formula is
true and every succedent formula is false.  ``bounded_validity``
exhaustively enumerates frames of a class up to a world bound (one
representative per isomorphism class) together with all valuations over
the atoms of the query, and reports either the first countermodel in
canonical enumeration order or a bounded no-countermodel verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from .syntax import And, Atom, Box, Formula, Hypersequent, Neg, Or


class SemanticsError(ValueError):
    pass


@dataclass(frozen=True)
class KripkeFrame:
    worlds: tuple[str, ...]
    rel: frozenset[tuple[str, str]]

    def __post_init__(self):
        ws = set(self.worlds)
        for a, b in self.rel:
            if a not in ws or b not in ws:
                raise SemanticsError(f"edge ({a},{b}) uses an unknown world")

    def successors(self, w: str) -> list[str]:
        return sorted(b for a, b in self.rel if a == w)


@dataclass
class KripkeModel:
    frame: KripkeFrame
    val: dict[str, dict[str, int]]

    def value(self, world: str, atom: str) -> int:
        if world not in self.frame.worlds:
            raise SemanticsError(f"unknown world {world!r}")
        try:
            return self.val[world][atom]
        except KeyError:
            raise SemanticsError(f"atom {atom!r} has no value at world {world!r}") from None


class FrameClass(enum.Enum):
    K = "k"
    D = "d"
    T = "t"
    KB = "kb"
    K4 = "k4"
    B = "b"
    S4 = "s4"
    S5 = "s5"

    @property
    def conditions(self) -> tuple[str, ...]:
        return _CONDITIONS[self]


_CONDITIONS: dict[FrameClass, tuple[str, ...]] = {
    FrameClass.K: (),
    FrameClass.D: ("serial",),
    FrameClass.T: ("reflexive",),
    FrameClass.KB: ("symmetric",),
    FrameClass.K4: ("transitive",),
    FrameClass.B: ("reflexive", "symmetric"),
    FrameClass.S4: ("reflexive", "transitive"),
    FrameClass.S5: ("reflexive", "symmetric", "transitive"),
}

#: The hypersequent system whose frame class each entry is.
SYSTEM_FRAME_CLASS: dict[str, FrameClass] = {
    "rk": FrameClass.K,
    "rd": FrameClass.D,
    "rt": FrameClass.T,
    "rkb": FrameClass.KB,
    "rk4": FrameClass.K4,
    "rb": FrameClass.B,
    "rs4": FrameClass.S4,
    "rs5": FrameClass.S5,
    "rtb": FrameClass.B,
}


@dataclass(frozen=True)
class FrameCheck:
    ok: bool
    condition: Optional[str] = None
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def check_frame_class(frame: KripkeFrame, cls: FrameClass) -> FrameCheck:
    """True iff all conditions of the class hold; else the first violation."""
    worlds = frame.worlds
    rel = frame.rel
    for condition in cls.conditions:
        if condition == "serial":
            for w in worlds:
                if not any((w, u) in rel for u in worlds):
                    return FrameCheck(False, "serial", (w,))
        elif condition == "reflexive":
            for w in worlds:
                if (w, w) not in rel:
                    return FrameCheck(False, "reflexive", (w,))
        elif condition == "symmetric":
            for a, b in sorted(rel):
                if (b, a) not in rel:
                    return FrameCheck(False, "symmetric", (a, b))
        elif condition == "transitive":
            for a, b in sorted(rel):
                for c in worlds:
                    if (b, c) in rel and (a, c) not in rel:
                        return FrameCheck(False, "transitive", (a, b, c))
    return FrameCheck(True)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(m: KripkeModel, w: str, f: Formula,
             _cache: Optional[dict] = None) -> int:
    """Recursive evaluation; returns 1 or 0."""
    if w not in m.frame.worlds:
        raise SemanticsError(f"unknown world {w!r}")
    cache = _cache if _cache is not None else {}
    return _eval(m, w, f, cache)


def _eval(m: KripkeModel, w: str, f: Formula, cache: dict) -> int:
    key = (w, f)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if isinstance(f, Atom):
        v = m.value(w, f.name)
    elif isinstance(f, Neg):
        v = 1 - _eval(m, w, f.sub, cache)
    elif isinstance(f, And):
        v = 1 if (_eval(m, w, f.left, cache) and _eval(m, w, f.right, cache)) else 0
    elif isinstance(f, Or):
        v = 1 if (_eval(m, w, f.left, cache) or _eval(m, w, f.right, cache)) else 0
    else:
        v = 1
        for u in m.frame.successors(w):
            if _eval(m, u, f.sub, cache) == 0:
                v = 0
                break
    cache[key] = v
    return v


def branches(frame: KripkeFrame, n: int) -> Iterator[tuple[str, ...]]:
    """All sequences w1..wn with each step in the relation, in lexical order."""
    if n < 1:
        raise ValueError("branch length must be >= 1")

    def extend(prefix: tuple[str, ...]) -> Iterator[tuple[str, ...]]:
        if len(prefix) == n:
            yield prefix
            return
        for u in frame.successors(prefix[-1]):
            yield from extend(prefix + (u,))

    for w in sorted(frame.worlds):
        yield from extend((w,))


def countermodels_hypersequent(m: KripkeModel, h: Hypersequent) -> Optional[tuple[str, ...]]:
    """First branch countermodelling every component, or None."""
    cache: dict = {}
    for branch in branches(m.frame, len(h)):
        if _branch_refutes(m, h, branch, cache):
            return branch
    return None


def _branch_refutes(m: KripkeModel, h: Hypersequent, branch: tuple[str, ...], cache: dict) -> bool:
    for s, w in zip(h.components, branch):
        if any(_eval(m, w, f, cache) != 1 for f in s.left):
            return False
        if any(_eval(m, w, f, cache) != 0 for f in s.right):
            return False
    return True


# ---------------------------------------------------------------------------
# Bounded validity (semantic oracle)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundedVerdict:
    status: str                       # "no-countermodel-up-to-bound" | "countermodel"
    frame_class: FrameClass
    bound: int
    frames_checked: int
    model: Optional[KripkeModel] = None
    branch: Optional[tuple[str, ...]] = None

    @property
    def found(self) -> bool:
        return self.status == "countermodel"


def world_names(n: int) -> tuple[str, ...]:
    return tuple(f"w{i}" for i in range(n))


def bounded_validity(h: Hypersequent, cls: FrameClass, max_worlds: int,
                     atoms: Optional[Iterable[str]] = None) -> BoundedVerdict:
    """Exhaustive countermodel search up to ``max_worlds`` worlds.

    Frames are enumerated one representative per isomorphism class (for
    the sizes where that is feasible) in a fixed canonical order, so the
    result is deterministic.  Valuations range over the atoms of the
    query only; other atoms cannot affect the verdict.
    """
    from .frames import iter_frames, mask_successors

    if max_worlds < 1:
        raise ValueError("max_worlds must be >= 1")
    names = sorted(set(atoms) if atoms is not None else h.atoms())
    checked = 0
    m = len(h)
    for n in range(1, max_worlds + 1):
        n_val = 1 << (len(names) * n)
        for mask in iter_frames(cls, n):
            checked += 1
            succ = mask_successors(mask, n)
            found = _find_countermodel(h, succ, n, names, n_val)
            if found is not None:
                v_index, path = found
                model = _build_model(mask, n, names, v_index)
                branch = tuple(f"w{i}" for i in path)
                return BoundedVerdict("countermodel", cls, max_worlds, checked, model, branch)
    return BoundedVerdict("no-countermodel-up-to-bound", cls, max_worlds, checked)


def _find_countermodel(h: Hypersequent, succ: list[list[int]], n: int,
                       names: list[str], n_val: int):
    tables: dict = {}
    atom_index = {a: i for i, a in enumerate(names)}

    def table(f: Formula) -> np.ndarray:
        hit = tables.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            idx = np.arange(n_val, dtype=np.int64)
            t = np.empty((n_val, n), dtype=bool)
            for w in range(n):
                t[:, w] = (idx >> (atom_index[f.name] * n + w)) & 1 == 1
        elif isinstance(f, Neg):
            t = ~table(f.sub)
        elif isinstance(f, And):
            t = table(f.left) & table(f.right)
        elif isinstance(f, Or):
            t = table(f.left) | table(f.right)
        else:
            sub = table(f.sub)
            t = np.empty((n_val, n), dtype=bool)
            for w in range(n):
                t[:, w] = sub[:, succ[w]].all(axis=1) if succ[w] else True
        tables[f] = t
        return t

    constraints = []
    for s in h.components:
        c = np.ones((n_val, n), dtype=bool)
        for f in s.left:
            c &= table(f)
        for f in s.right:
            c &= ~table(f)
        if not c.any():
            return None
        constraints.append(c)

    m = len(h)

    def walk(path: list[int], mask: np.ndarray):
        if len(path) == m:
            idx = int(np.argmax(mask))
            return idx, tuple(path)
        for u in succ[path[-1]]:
            nxt = mask & constraints[len(path)][:, u]
            if nxt.any():
                hit = walk(path + [u], nxt)
                if hit is not None:
                    return hit
        return None

    for w in range(n):
        start = constraints[0][:, w]
        if start.any():
            hit = walk([w], start)
            if hit is not None:
                return hit
    return None


def _build_model(mask: int, n: int, names: list[str], v_index: int) -> KripkeModel:
    from .frames import mask_to_rel

    worlds = world_names(n)
    val = {
        worlds[w]: {a: (v_index >> (i * n + w)) & 1 for i, a in enumerate(names)}
        for w in range(n)
    }
    return KripkeModel(KripkeFrame(worlds, mask_to_rel(mask, n)), val)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def model_to_data(m: KripkeModel) -> dict:
    return {
        "worlds": list(m.frame.worlds),
        "rel": sorted([a, b] for a, b in m.frame.rel),
        "val": {w: {a: m.val[w][a] for a in sorted(m.val.get(w, {}))} for w in m.frame.worlds},
    }


def model_from_data(data: dict) -> KripkeModel:
    worlds = tuple(data["worlds"])
    rel = frozenset((a, b) for a, b in data["rel"])
    val = {w: {a: int(v) for a, v in data.get("val", {}).get(w, {}).items()} for w in worlds}
    return KripkeModel(KripkeFrame(worlds, rel), val)
