"""Exhaustive backwards proof search and a forward derivation fuzzer.

The search enumerates, for a goal hypersequent, every rule instance
whose conclusion matches it (including the instances where the
principal formula also stays in the context, which set-valued sides
make possible), and recurses on the premises.  Goals repeated along the
current path are pruned: a minimal proof never repeats a goal on a
branch.  Failures are memoized globally only when they did not lean on
any path ancestor, so a cached failure is failure absolutely.

``unprovable-exhausted`` is reported only when the whole space within
the limits was explored and no branch was cut off by a limit; searches
that hit ``max_components`` or ``max_depth`` report
``unknown-limit-hit`` instead.  Cut is never applied backwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .calculus import (
    CalculusSpec,
    Derivation,
    RuleApplication,
    RuleId,
    check_derivation,
)
from .syntax import (
    And,
    Atom,
    Box,
    EMPTY_SEQUENT,
    Formula,
    Hypersequent,
    Neg,
    Or,
    Sequent,
    sorted_formulas,
)

_PROOF, _FAIL, _LIMIT = 0, 1, 2


@dataclass(frozen=True)
class SearchLimits:
    max_components: int
    max_depth: int


def default_limits(goal: Hypersequent) -> SearchLimits:
    # Backwards BoxR grows the hypersequent one component per right-hand
    # box, so that is the natural ceiling; growth past it is reported as
    # a limit hit, never silently treated as unprovable.
    return SearchLimits(max_components=len(goal) + goal.box_count() + 1, max_depth=60)


@dataclass
class SearchStats:
    expanded: int = 0
    memo_proof_hits: int = 0
    memo_fail_hits: int = 0
    cycle_prunes: int = 0


@dataclass
class SearchOutcome:
    status: str                      # "proof" | "unprovable-exhausted" | "unknown-limit-hit"
    goal: Hypersequent
    spec: CalculusSpec
    limits: SearchLimits
    derivation: Optional[Derivation] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def proved(self) -> bool:
        return self.status == "proof"


def search(goal: Hypersequent, spec: CalculusSpec,
           limits: Optional[SearchLimits] = None) -> SearchOutcome:
    """Exhaustive backwards search; deterministic for fixed inputs."""
    limits = limits or default_limits(goal)
    memo_proof: dict[Hypersequent, Derivation] = {}
    memo_fail: set[Hypersequent] = set()
    stats = SearchStats()
    path: set[Hypersequent] = set()

    def visit(h: Hypersequent, depth: int) -> tuple[int, Optional[Derivation], frozenset]:
        if h in memo_proof:
            stats.memo_proof_hits += 1
            return _PROOF, memo_proof[h], frozenset()
        if h in memo_fail:
            stats.memo_fail_hits += 1
            return _FAIL, None, frozenset()
        if h in path:
            stats.cycle_prunes += 1
            return _FAIL, None, frozenset({h})
        if len(h) > limits.max_components or depth >= limits.max_depth:
            return _LIMIT, None, frozenset()
        stats.expanded += 1
        path.add(h)
        limit_seen = False
        deps: set[Hypersequent] = set()
        try:
            for app, premises in instances(h, spec):
                sub: list[Derivation] = []
                failed = False
                for p in premises:
                    st, payload, pdeps = visit(p, depth + 1)
                    if st == _PROOF:
                        sub.append(payload)
                        continue
                    failed = True
                    if st == _FAIL:
                        deps |= pdeps
                    else:
                        limit_seen = True
                    break
                if not failed:
                    d = Derivation(h, app, tuple(sub))
                    memo_proof[h] = d
                    return _PROOF, d, frozenset()
        finally:
            path.discard(h)
        if limit_seen:
            return _LIMIT, None, frozenset()
        deps.discard(h)
        if not deps:
            memo_fail.add(h)
            return _FAIL, None, frozenset()
        return _FAIL, None, frozenset(deps)

    st, payload, _ = visit(goal, 0)
    status = {_PROOF: "proof", _FAIL: "unprovable-exhausted", _LIMIT: "unknown-limit-hit"}[st]
    return SearchOutcome(status, goal, spec, limits, payload, stats)


# ---------------------------------------------------------------------------
# Backwards rule instances
# ---------------------------------------------------------------------------

def instances(h: Hypersequent, spec: CalculusSpec
              ) -> Iterator[tuple[RuleApplication, tuple[Hypersequent, ...]]]:
    """All rule instances concluding ``h``, in a fixed canonical order.

    For every principal-consuming rule both the consuming reading and
    the context-overlap reading (principal kept) are produced; premise
    tuples are deduplicated per goal.
    """
    seen: set[tuple] = set()

    def emit(app: RuleApplication, premises: tuple[Hypersequent, ...]):
        if premises and all(p == h for p in premises):
            return None   # pure self-loop, never useful
        key = (app.rule, premises)
        if key in seen:
            return None
        seen.add(key)
        return app, premises

    n = len(h)
    rules = spec.rules

    if RuleId.ID in rules and n == 1:
        s = h[0]
        if len(s.left) == 1 and s.left == s.right and isinstance(next(iter(s.left)), Atom):
            got = emit(RuleApplication(RuleId.ID), ())
            if got:
                yield got
            return   # an axiom instance needs no further search

    for sigma in range(n):
        s = h[sigma]
        for phi in sorted_formulas(s.left):
            if isinstance(phi, Neg) and RuleId.NEG_L in rules:
                for keep in (False, True):
                    left = s.left if keep else s.left - {phi}
                    prem = h.replace(sigma, Sequent(left, s.right | {phi.sub}))
                    got = emit(RuleApplication(RuleId.NEG_L, sigma, principal=phi), (prem,))
                    if got:
                        yield got
            if isinstance(phi, And):
                for rule, part in ((RuleId.AND_L1, phi.left), (RuleId.AND_L2, phi.right)):
                    if rule not in rules:
                        continue
                    for keep in (False, True):
                        left = (s.left if keep else s.left - {phi}) | {part}
                        prem = h.replace(sigma, Sequent(left, s.right))
                        got = emit(RuleApplication(rule, sigma, principal=phi), (prem,))
                        if got:
                            yield got
            if isinstance(phi, Or) and RuleId.OR_L in rules:
                for keep in (False, True):
                    base = s.left if keep else s.left - {phi}
                    p1 = h.replace(sigma, Sequent(base | {phi.left}, s.right))
                    p2 = h.replace(sigma, Sequent(base | {phi.right}, s.right))
                    got = emit(RuleApplication(RuleId.OR_L, sigma, principal=phi), (p1, p2))
                    if got:
                        yield got
            if isinstance(phi, Box) and RuleId.BOX_L in rules and sigma < n - 1:
                nxt = h[sigma + 1]
                for keep in (False, True):
                    left = s.left if keep else s.left - {phi}
                    prem = h.replace(sigma, Sequent(left, s.right)).replace(
                        sigma + 1, Sequent(nxt.left | {phi.sub}, nxt.right))
                    got = emit(RuleApplication(RuleId.BOX_L, sigma, principal=phi), (prem,))
                    if got:
                        yield got
            if isinstance(phi, Box) and RuleId.T in rules:
                for keep in (False, True):
                    left = (s.left if keep else s.left - {phi}) | {phi.sub}
                    prem = h.replace(sigma, Sequent(left, s.right))
                    got = emit(RuleApplication(RuleId.T, sigma, principal=phi), (prem,))
                    if got:
                        yield got
        for phi in sorted_formulas(s.right):
            if isinstance(phi, Neg) and RuleId.NEG_R in rules:
                for keep in (False, True):
                    right = s.right if keep else s.right - {phi}
                    prem = h.replace(sigma, Sequent(s.left | {phi.sub}, right))
                    got = emit(RuleApplication(RuleId.NEG_R, sigma, principal=phi), (prem,))
                    if got:
                        yield got
            if isinstance(phi, And) and RuleId.AND_R in rules:
                for keep in (False, True):
                    base = s.right if keep else s.right - {phi}
                    p1 = h.replace(sigma, Sequent(s.left, base | {phi.left}))
                    p2 = h.replace(sigma, Sequent(s.left, base | {phi.right}))
                    got = emit(RuleApplication(RuleId.AND_R, sigma, principal=phi), (p1, p2))
                    if got:
                        yield got
            if isinstance(phi, Or):
                for rule, part in ((RuleId.OR_R1, phi.left), (RuleId.OR_R2, phi.right)):
                    if rule not in rules:
                        continue
                    for keep in (False, True):
                        right = (s.right if keep else s.right - {phi}) | {part}
                        prem = h.replace(sigma, Sequent(s.left, right))
                        got = emit(RuleApplication(rule, sigma, principal=phi), (prem,))
                        if got:
                            yield got
            if isinstance(phi, Box) and RuleId.BOX_R in rules and sigma == n - 1:
                for keep in (False, True):
                    right = s.right if keep else s.right - {phi}
                    prem = Hypersequent(
                        h.components[:sigma]
                        + (Sequent(s.left, right), Sequent.make((), (phi.sub,))))
                    got = emit(RuleApplication(RuleId.BOX_R, sigma, principal=phi), (prem,))
                    if got:
                        yield got
        for phi in sorted_formulas(s.left):
            if RuleId.TL in rules:
                prem = h.replace(sigma, s.remove_left(phi))
                got = emit(RuleApplication(RuleId.TL, sigma, principal=phi), (prem,))
                if got:
                    yield got
        for phi in sorted_formulas(s.right):
            if RuleId.TR in rules:
                prem = h.replace(sigma, s.remove_right(phi))
                got = emit(RuleApplication(RuleId.TR, sigma, principal=phi), (prem,))
                if got:
                    yield got

    if n >= 2:
        if RuleId.EWL in rules and h[0].is_empty():
            got = emit(RuleApplication(RuleId.EWL, 0), (Hypersequent(h.components[1:]),))
            if got:
                yield got
        if RuleId.EWR in rules and h[n - 1].is_empty():
            got = emit(RuleApplication(RuleId.EWR, n - 1), (Hypersequent(h.components[:-1]),))
            if got:
                yield got
        if RuleId.EW in rules:
            for sigma in range(n):
                if h[sigma].is_empty():
                    got = emit(RuleApplication(RuleId.EW, sigma), (h.delete(sigma),))
                    if got:
                        yield got
        if RuleId.EE in rules:
            for sigma in range(n - 1):
                got = emit(RuleApplication(RuleId.EE, sigma), (h.swap(sigma),))
                if got:
                    yield got
    if RuleId.SYM in rules:
        got = emit(RuleApplication(RuleId.SYM, 0), (h.reverse(),))
        if got:
            yield got
    if RuleId.EC in rules:
        for sigma in range(n):
            got = emit(RuleApplication(RuleId.EC, sigma), (h.insert(sigma, h[sigma]),))
            if got:
                yield got
    if RuleId.DROP in rules:
        got = emit(RuleApplication(RuleId.DROP, 0), (h.append(EMPTY_SEQUENT),))
        if got:
            yield got
    if RuleId.MERGE in rules:
        for sigma in range(n):
            yield from _merge_instances(h, sigma, emit)


def _merge_instances(h: Hypersequent, sigma: int, emit):
    s = h[sigma]
    lefts = sorted_formulas(s.left)
    rights = sorted_formulas(s.right)
    if 3 ** (len(lefts) + len(rights)) > 4000:
        return
    for lsplit in _covers(lefts):
        for rsplit in _covers(rights):
            s1 = Sequent(frozenset(lsplit[0]), frozenset(rsplit[0]))
            s2 = Sequent(frozenset(lsplit[1]), frozenset(rsplit[1]))
            prem = h.replace(sigma, s1).insert(sigma + 1, s2)
            got = emit(RuleApplication(RuleId.MERGE, sigma), (prem,))
            if got:
                yield got


def _covers(items: list) -> Iterator[tuple[list, list]]:
    if not items:
        yield [], []
        return
    head, rest = items[0], items[1:]
    for a, b in _covers(rest):
        yield [head] + a, b
        yield a, [head] + b
        yield [head] + a, [head] + b


# ---------------------------------------------------------------------------
# Forward fuzzing
# ---------------------------------------------------------------------------

def fuzz_derivations(spec: CalculusSpec, count: int, max_depth: int,
                     atom_pool: tuple[str, ...] = ("p", "q"),
                     seed: int = 0) -> Iterator[Derivation]:
    """Random valid derivations grown forward from axiom leaves.

    Every emitted derivation passes ``check_derivation`` for the given
    spec (asserted here, so a schema regression fails loudly).
    """
    rng = random.Random(seed)
    for _ in range(count):
        d = _grow(spec, rng, max_depth, atom_pool)
        res = check_derivation(d, spec)
        assert res, f"fuzzer produced an invalid derivation: {res.message}"
        yield d


def _random_formula(rng: random.Random, atom_pool, depth: int = 2) -> Formula:
    if depth == 0 or rng.random() < 0.4:
        return Atom(rng.choice(atom_pool))
    kind = rng.choice("nbao")
    if kind == "n":
        return Neg(_random_formula(rng, atom_pool, depth - 1))
    if kind == "b":
        return Box(_random_formula(rng, atom_pool, depth - 1))
    if kind == "a":
        return And(_random_formula(rng, atom_pool, depth - 1),
                   _random_formula(rng, atom_pool, depth - 1))
    return Or(_random_formula(rng, atom_pool, depth - 1),
              _random_formula(rng, atom_pool, depth - 1))


def _grow(spec: CalculusSpec, rng: random.Random, max_depth: int, atom_pool) -> Derivation:
    a = Atom(rng.choice(atom_pool))
    d = Derivation(Hypersequent.make([Sequent.make([a], [a])]),
                   RuleApplication(RuleId.ID))
    for _ in range(rng.randint(0, max_depth)):
        moves = list(_forward_moves(d, spec, rng, atom_pool))
        if not moves:
            break
        d = rng.choice(moves)()
    return d


def _forward_moves(d: Derivation, spec: CalculusSpec, rng: random.Random, atom_pool):
    h = d.conclusion
    n = len(h)
    rules = spec.rules

    def node(conclusion, rule, premises, component=0, principal=None):
        return Derivation(conclusion, RuleApplication(rule, component, principal=principal),
                          tuple(premises))

    if RuleId.EWL in rules:
        yield lambda: node(h.insert(0, EMPTY_SEQUENT), RuleId.EWL, [d], 0)
    if RuleId.EWR in rules:
        yield lambda: node(h.append(EMPTY_SEQUENT), RuleId.EWR, [d], n)
    if RuleId.EW in rules:
        sigma = rng.randint(0, n)
        yield lambda s=sigma: node(h.insert(s, EMPTY_SEQUENT), RuleId.EW, [d], s)
    if RuleId.SYM in rules and n >= 2:
        yield lambda: node(h.reverse(), RuleId.SYM, [d], 0)
    if RuleId.EE in rules and n >= 2:
        sigma = rng.randint(0, n - 2)
        yield lambda s=sigma: node(h.swap(s), RuleId.EE, [d], s)
    if RuleId.EC in rules:
        for sigma in range(n - 1):
            if h[sigma] == h[sigma + 1]:
                yield lambda s=sigma: node(h.delete(s), RuleId.EC, [d], s)
                break
    if RuleId.DROP in rules and n >= 2 and h[n - 1].is_empty():
        yield lambda: node(Hypersequent(h.components[:-1]), RuleId.DROP, [d], 0)

    sigma = rng.randint(0, n - 1)
    s = h[sigma]
    extra = _random_formula(rng, atom_pool)
    if RuleId.TL in rules:
        yield lambda f=extra, s_=sigma: node(
            h.replace(s_, h[s_].add_left(f)), RuleId.TL, [d], s_, f)
    if RuleId.TR in rules:
        yield lambda f=extra, s_=sigma: node(
            h.replace(s_, h[s_].add_right(f)), RuleId.TR, [d], s_, f)

    lefts = sorted_formulas(s.left)
    rights = sorted_formulas(s.right)
    if rights and RuleId.NEG_L in rules:
        phi = rng.choice(rights)
        yield lambda f=phi, s_=sigma: node(
            h.replace(s_, Sequent(h[s_].left | {Neg(f)}, h[s_].right - {f})),
            RuleId.NEG_L, [d], s_, Neg(f))
    if lefts and RuleId.NEG_R in rules:
        phi = rng.choice(lefts)
        yield lambda f=phi, s_=sigma: node(
            h.replace(s_, Sequent(h[s_].left - {f}, h[s_].right | {Neg(f)})),
            RuleId.NEG_R, [d], s_, Neg(f))
    if lefts:
        phi = rng.choice(lefts)
        other = _random_formula(rng, atom_pool)
        if RuleId.AND_L1 in rules:
            yield lambda f=phi, g=other, s_=sigma: node(
                h.replace(s_, Sequent((h[s_].left - {f}) | {And(f, g)}, h[s_].right)),
                RuleId.AND_L1, [d], s_, And(f, g))
        if RuleId.AND_L2 in rules:
            yield lambda f=phi, g=other, s_=sigma: node(
                h.replace(s_, Sequent((h[s_].left - {f}) | {And(g, f)}, h[s_].right)),
                RuleId.AND_L2, [d], s_, And(g, f))
    if rights:
        phi = rng.choice(rights)
        other = _random_formula(rng, atom_pool)
        if RuleId.OR_R1 in rules:
            yield lambda f=phi, g=other, s_=sigma: node(
                h.replace(s_, Sequent(h[s_].left, (h[s_].right - {f}) | {Or(f, g)})),
                RuleId.OR_R1, [d], s_, Or(f, g))
        if RuleId.OR_R2 in rules:
            yield lambda f=phi, g=other, s_=sigma: node(
                h.replace(s_, Sequent(h[s_].left, (h[s_].right - {f}) | {Or(g, f)})),
                RuleId.OR_R2, [d], s_, Or(g, f))
    if RuleId.AND_R in rules:
        phi, psi = _random_formula(rng, atom_pool), _random_formula(rng, atom_pool)
        d2 = node(h.replace(sigma, s.add_right(phi)), RuleId.TR, [d], sigma, phi)
        d3 = node(h.replace(sigma, s.add_right(psi)), RuleId.TR, [d], sigma, psi)
        yield lambda f=phi, g=psi, s_=sigma, a=d2, b=d3: node(
            h.replace(s_, s.add_right(And(f, g))), RuleId.AND_R, [a, b], s_, And(f, g))
    if RuleId.OR_L in rules:
        phi, psi = _random_formula(rng, atom_pool), _random_formula(rng, atom_pool)
        d2 = node(h.replace(sigma, s.add_left(phi)), RuleId.TL, [d], sigma, phi)
        d3 = node(h.replace(sigma, s.add_left(psi)), RuleId.TL, [d], sigma, psi)
        yield lambda f=phi, g=psi, s_=sigma, a=d2, b=d3: node(
            h.replace(s_, s.add_left(Or(f, g))), RuleId.OR_L, [a, b], s_, Or(f, g))
    if RuleId.BOX_L in rules and n >= 2:
        for tau in range(n - 1):
            cands = sorted_formulas(h[tau + 1].left)
            if cands:
                phi = rng.choice(cands)
                yield lambda f=phi, s_=tau: node(
                    h.replace(s_, h[s_].add_left(Box(f))).replace(
                        s_ + 1, h[s_ + 1].remove_left(f)),
                    RuleId.BOX_L, [d], s_, Box(f))
                break
    if RuleId.BOX_R in rules and n >= 2:
        last = h[n - 1]
        if not last.left and len(last.right) == 1:
            phi = next(iter(last.right))
            prev = h[n - 2]
            concl = Hypersequent(h.components[:n - 2] + (prev.add_right(Box(phi)),))
            yield lambda c=concl, f=phi: node(c, RuleId.BOX_R, [d], n - 2, Box(f))
    if RuleId.T in rules:
        if lefts:
            phi = rng.choice(lefts)
            yield lambda f=phi, s_=sigma: node(
                h.replace(s_, Sequent((h[s_].left - {f}) | {Box(f)}, h[s_].right)),
                RuleId.T, [d], s_, Box(f))
    if spec.cut_enabled:
        phi = _random_formula(rng, atom_pool)
        d2 = node(h.replace(sigma, s.add_right(phi)), RuleId.TR, [d], sigma, phi)
        d3 = node(h.replace(sigma, s.add_left(phi)), RuleId.TL, [d], sigma, phi)
        yield lambda f=phi, s_=sigma, a=d2, b=d3: node(h, RuleId.CUT, [a, b], s_, f)
