"""Two-relation frames with three-valued Strong Kleene evaluation.

These structures replace strict transitivity with a simulation relation
``S``: composition of two R-steps is matched by one R-step up to an
S-related copy, and S satisfies the standard bisimulation back-and-forth
conditions.  Valuations are three-valued (1, 0, or undefined ``*``) and
S may only move forward in the information order: whatever is defined at
a point stays defined, with the same value, at its S-successors.  That
is exactly what makes cut-free proofs in the transitive-frame systems
sound for these models while the transitively valid formula C fails in
one of them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .kripke import KripkeFrame, KripkeModel, SemanticsError
from .syntax import And, Atom, Box, Formula, Hypersequent, Neg, Or, formula_to_text

STAR = "*"
TruthValue = Union[int, str]   # 0, 1 or STAR


@dataclass(frozen=True)
class PS4Frame:
    worlds: tuple[str, ...]
    rel_r: frozenset[tuple[str, str]]
    rel_s: frozenset[tuple[str, str]]

    def r_successors(self, w: str) -> list[str]:
        return sorted(b for a, b in self.rel_r if a == w)

    def s_successors(self, w: str) -> list[str]:
        return sorted(b for a, b in self.rel_s if a == w)


@dataclass
class PS4Model:
    frame: PS4Frame
    val: dict[str, dict[str, TruthValue]]

    def value(self, world: str, atom: str) -> TruthValue:
        if world not in self.frame.worlds:
            raise SemanticsError(f"unknown world {world!r}")
        return self.val.get(world, {}).get(atom, STAR)

    def atoms(self) -> list[str]:
        names: set[str] = set()
        for assignment in self.val.values():
            names.update(assignment)
        return sorted(names)


@dataclass(frozen=True)
class PS4Check:
    ok: bool
    condition: Optional[str] = None
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def check_ps4_frame(fr: PS4Frame) -> PS4Check:
    """Verify the five frame conditions by enumeration; first violation wins."""
    ws = fr.worlds
    r, s = fr.rel_r, fr.rel_s
    for x in ws:
        if (x, x) not in s:
            return PS4Check(False, "s-reflexivity", (x,))
    for x in ws:
        if (x, x) not in r:
            return PS4Check(False, "r-reflexivity", (x,))
    for x, y in sorted(r):
        for z in ws:
            if (y, z) in r and not any((x, w) in r and (z, w) in s for w in ws):
                return PS4Check(False, "pseudo-transitivity", (x, y, z))
    for x, y in sorted(r):
        for z in ws:
            if (x, z) in s and not any((z, w) in r and (y, w) in s for w in ws):
                return PS4Check(False, "forth", (x, y, z))
    for x, z in sorted(s):
        for w in ws:
            if (z, w) in r and not any((x, y) in r and (y, w) in s for y in ws):
                return PS4Check(False, "back", (x, z, w))
    return PS4Check(True)


def check_s_information_preservation(m: PS4Model) -> PS4Check:
    """Atom-level information preservation along S (the model invariant)."""
    for x, y in sorted(m.frame.rel_s):
        for atom in m.atoms():
            vx = m.value(x, atom)
            if vx != STAR and m.value(y, atom) != vx:
                return PS4Check(False, "s-information-preservation", (x, y, atom))
    return PS4Check(True)


def validate_ps4_model(m: PS4Model) -> PS4Check:
    frame = check_ps4_frame(m.frame)
    if not frame:
        return frame
    return check_s_information_preservation(m)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate3(m: PS4Model, w: str, f: Formula,
              _cache: Optional[dict] = None) -> TruthValue:
    """Strong Kleene evaluation: 1/0 only when forced, ``*`` otherwise."""
    if w not in m.frame.worlds:
        raise SemanticsError(f"unknown world {w!r}")
    cache = _cache if _cache is not None else {}
    return _eval3(m, w, f, cache)


def _eval3(m: PS4Model, w: str, f: Formula, cache: dict) -> TruthValue:
    key = (w, f)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if isinstance(f, Atom):
        v = m.value(w, f.name)
    elif isinstance(f, Neg):
        v = _not3(_eval3(m, w, f.sub, cache))
    elif isinstance(f, And):
        v = _and3(_eval3(m, w, f.left, cache), _eval3(m, w, f.right, cache))
    elif isinstance(f, Or):
        v = _not3(_and3(_not3(_eval3(m, w, f.left, cache)),
                        _not3(_eval3(m, w, f.right, cache))))
    else:
        vs = [_eval3(m, u, f.sub, cache) for u in m.frame.r_successors(w)]
        if any(x == 0 for x in vs):
            v = 0
        elif all(x == 1 for x in vs):
            v = 1
        else:
            v = STAR
    cache[key] = v
    return v


def _not3(v: TruthValue) -> TruthValue:
    if v == 1:
        return 0
    if v == 0:
        return 1
    return STAR


def _and3(a: TruthValue, b: TruthValue) -> TruthValue:
    if a == 0 or b == 0:
        return 0
    if a == 1 and b == 1:
        return 1
    return STAR


def information_le(m: PS4Model, x: str, y: str) -> bool:
    """x is earlier than y: every atom defined at x keeps its value at y."""
    return all(m.value(x, a) == STAR or m.value(x, a) == m.value(y, a) for a in m.atoms())


# ---------------------------------------------------------------------------
# Preservation over compound formulas
# ---------------------------------------------------------------------------

def check_s_preservation(m: PS4Model, depth: int) -> PS4Check:
    """Defined values propagate along S for every formula up to ``depth``.

    Rather than enumerating the (hugely redundant) formula space, this
    walks the value tables reachable in ``depth`` connective
    applications; two formulas with the same table are indistinguishable
    here, and there are at most 3^|worlds| tables.  Each table carries a
    smallest representative formula for the violation report.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    worlds = list(m.frame.worlds)
    succ = {w: m.frame.r_successors(w) for w in worlds}
    s_pairs = sorted(m.frame.rel_s)

    def violated(table: tuple[TruthValue, ...], repr_f: Formula) -> Optional[PS4Check]:
        idx = {w: i for i, w in enumerate(worlds)}
        for x, y in s_pairs:
            vx = table[idx[x]]
            if vx != STAR and table[idx[y]] != vx:
                return PS4Check(False, "s-preservation", (x, y, repr_f))
        return None

    tables: dict[tuple[TruthValue, ...], Formula] = {}
    for atom in m.atoms() or ["p"]:
        t = tuple(m.value(w, atom) for w in worlds)
        tables.setdefault(t, Atom(atom))
        bad = violated(t, Atom(atom))
        if bad:
            return bad

    def box_table(t: tuple[TruthValue, ...]) -> tuple[TruthValue, ...]:
        idx = {w: i for i, w in enumerate(worlds)}
        out = []
        for w in worlds:
            vs = [t[idx[u]] for u in succ[w]]
            if any(v == 0 for v in vs):
                out.append(0)
            elif all(v == 1 for v in vs):
                out.append(1)
            else:
                out.append(STAR)
        return tuple(out)

    frontier = dict(tables)
    for _ in range(depth):
        new: dict[tuple[TruthValue, ...], Formula] = {}
        items = sorted(tables.items(), key=lambda kv: formula_to_text(kv[1]))
        fresh = sorted(frontier.items(), key=lambda kv: formula_to_text(kv[1]))
        for t, f in fresh:
            for cand_t, cand_f in ((tuple(_not3(v) for v in t), Neg(f)),
                                   (box_table(t), Box(f))):
                if cand_t not in tables and cand_t not in new:
                    new[cand_t] = cand_f
        for t1, f1 in fresh:
            for t2, f2 in items:
                for cand_t, cand_f in (
                        (tuple(_and3(a, b) for a, b in zip(t1, t2)), And(f1, f2)),
                        (tuple(_not3(_and3(_not3(a), _not3(b))) for a, b in zip(t1, t2)),
                         Or(f1, f2))):
                    if cand_t not in tables and cand_t not in new:
                        new[cand_t] = cand_f
        if not new:
            break
        for t, f in new.items():
            bad = violated(t, f)
            if bad:
                return bad
        tables.update(new)
        frontier = new
    return PS4Check(True)


# ---------------------------------------------------------------------------
# Branches and countermodels
# ---------------------------------------------------------------------------

def r_branches(frame: PS4Frame, n: int) -> Iterator[tuple[str, ...]]:
    if n < 1:
        raise ValueError("branch length must be >= 1")

    def extend(prefix: tuple[str, ...]) -> Iterator[tuple[str, ...]]:
        if len(prefix) == n:
            yield prefix
            return
        for u in frame.r_successors(prefix[-1]):
            yield from extend(prefix + (u,))

    for w in sorted(frame.worlds):
        yield from extend((w,))


def copy_branch(m: PS4Model, branch: tuple[str, ...], i: int) -> tuple[str, ...]:
    """Drop the point at (0-based) index ``i`` and copy the tail along S.

    Follows the frame conditions: pseudo-transitivity supplies an
    S-copy of the point after the gap, and iterating the forth condition
    copies the rest of the branch.  Requires 1 <= i <= len(branch) - 2;
    the boundary case i == 0 has no anchor before the gap and is
    rejected.
    """
    n = len(branch)
    for a, b in zip(branch, branch[1:]):
        if (a, b) not in m.frame.rel_r:
            raise SemanticsError(f"not an R-branch: missing ({a},{b})")
    if not 1 <= i <= n - 2:
        raise ValueError(f"drop index must be in [1, {n - 2}], got {i}")
    r, s = m.frame.rel_r, m.frame.rel_s
    anchor = branch[i - 1]
    copies: list[str] = []
    prev = anchor
    for j in range(i + 1, n):
        cands = sorted(w for w in m.frame.worlds
                       if (prev, w) in r and (branch[j], w) in s)
        if not cands:
            raise SemanticsError(
                f"frame condition violated: no witness for ({prev}, {branch[j]})")
        copies.append(cands[0])
        prev = cands[0]
    return branch[:i] + tuple(copies)


def ps4_countermodel(m: PS4Model, h: Hypersequent) -> Optional[tuple[str, ...]]:
    """First R-branch where every antecedent is exactly 1 and every
    succedent exactly 0; an undefined value disqualifies both sides."""
    cache: dict = {}
    for branch in r_branches(m.frame, len(h)):
        ok = True
        for s, w in zip(h.components, branch):
            if any(_eval3(m, w, f, cache) != 1 for f in s.left):
                ok = False
                break
            if any(_eval3(m, w, f, cache) != 0 for f in s.right):
                ok = False
                break
        if ok:
            return branch
    return None


def to_kripke(m: PS4Model) -> KripkeModel:
    """Forget S and read the valuation two-valued; requires no ``*``."""
    val: dict[str, dict[str, int]] = {}
    for w in m.frame.worlds:
        val[w] = {}
        for a in m.atoms():
            v = m.value(w, a)
            if v == STAR:
                raise SemanticsError(f"value of {a!r} at {w!r} is undefined")
            val[w][a] = int(v)
    return KripkeModel(KripkeFrame(m.frame.worlds, m.frame.rel_r), val)


# ---------------------------------------------------------------------------
# The six-point countermodel
# ---------------------------------------------------------------------------

def builtin_fig5_model() -> PS4Model:
    """The six-point model refuting C at the single-point branch (i,).

    R extends reflexivity by i->j, j->k, k->m, i->n, n->l, i->l and S
    extends reflexivity by m~>k, m~>n, m~>l, k~>n; p is undefined at m.
    """
    worlds = ("i", "j", "k", "m", "n", "l")
    refl = {(w, w) for w in worlds}
    rel_r = frozenset(refl | {("i", "j"), ("j", "k"), ("k", "m"),
                              ("i", "n"), ("n", "l"), ("i", "l")})
    rel_s = frozenset(refl | {("m", "k"), ("m", "n"), ("m", "l"), ("k", "n")})
    val: dict[str, dict[str, TruthValue]] = {
        "i": {"p": 0, "q": 0},
        "j": {"p": 1, "q": 0},
        "k": {"p": 1, "q": 1},
        "m": {"p": STAR, "q": 1},
        "n": {"p": 1, "q": 1},
        "l": {"p": 0, "q": 1},
    }
    return PS4Model(PS4Frame(worlds, rel_r, rel_s), val)


# ---------------------------------------------------------------------------
# Random model generation
# ---------------------------------------------------------------------------

def random_ps4_model(rng: random.Random, max_points: int = 5,
                     atoms: tuple[str, ...] = ("p", "q")) -> PS4Model:
    """Generate a valid model: seed R and S, then close R under the
    witness demands of the three composite conditions, then assign atoms
    and push defined values forward along S."""
    for _ in range(64):
        n = rng.randint(1, max_points)
        worlds = tuple(f"u{i}" for i in range(n))
        r = {(w, w) for w in worlds}
        s = {(w, w) for w in worlds}
        for a in worlds:
            for b in worlds:
                if a != b and rng.random() < 0.25:
                    r.add((a, b))
                if a != b and rng.random() < 0.12:
                    s.add((a, b))
        _saturate_r(worlds, r, s)
        frame = PS4Frame(worlds, frozenset(r), frozenset(s))
        if not check_ps4_frame(frame):
            continue
        val: dict[str, dict[str, TruthValue]] = {
            w: {a: rng.choice((0, 1, 1, 0, STAR)) for a in atoms} for w in worlds
        }
        if _settle_valuation(frame, val, atoms):
            model = PS4Model(frame, val)
            if validate_ps4_model(model):
                return model
    raise RuntimeError("could not generate a valid model; widen the retry budget")


def _saturate_r(worlds: tuple[str, ...], r: set, s: set) -> None:
    # Each unmet instance is repaired by one R-pair whose partner demand
    # is discharged by S-reflexivity; R only grows, so this terminates.
    changed = True
    while changed:
        changed = False
        for x, y in list(r):
            for z in worlds:
                if (y, z) in r and not any((x, w) in r and (z, w) in s for w in worlds):
                    r.add((x, z))
                    changed = True
        for x, y in list(r):
            for z in worlds:
                if (x, z) in s and not any((z, w) in r and (y, w) in s for w in worlds):
                    r.add((z, y))
                    changed = True
        for x, z in list(s):
            for w in list(worlds):
                if (z, w) in r and not any((x, y) in r and (y, w) in s for y in worlds):
                    r.add((x, w))
                    changed = True


def _settle_valuation(frame: PS4Frame, val: dict, atoms: tuple[str, ...]) -> bool:
    for _ in range(64):
        changed = False
        for x, y in sorted(frame.rel_s):
            if x == y:
                continue
            for a in atoms:
                vx, vy = val[x][a], val[y][a]
                if vx == STAR:
                    continue
                if vy == STAR:
                    val[y][a] = vx
                    changed = True
                elif vx != vy:
                    val[x][a] = STAR
                    changed = True
        if not changed:
            return True
    return False


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def ps4_model_to_data(m: PS4Model) -> dict:
    return {
        "worlds": list(m.frame.worlds),
        "relR": sorted([a, b] for a, b in m.frame.rel_r),
        "relS": sorted([a, b] for a, b in m.frame.rel_s),
        "val": {w: {a: m.val[w][a] for a in sorted(m.val.get(w, {}))} for w in m.frame.worlds},
    }


def ps4_model_from_data(data: dict) -> PS4Model:
    worlds = tuple(data["worlds"])
    rel_r = frozenset((a, b) for a, b in data["relR"])
    rel_s = frozenset((a, b) for a, b in data["relS"])
    val = {
        w: {a: (STAR if v == STAR else int(v)) for a, v in data.get("val", {}).get(w, {}).items()}
        for w in worlds
    }
    return PS4Model(PS4Frame(worlds, rel_r, rel_s), val)
