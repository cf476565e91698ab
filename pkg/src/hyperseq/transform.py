"""Constructive derivation-to-derivation transformations.

* ``translate`` renders a hypersequent as a single formula, one
  component after the other: a component contributes the implication
  from its antecedent conjunction to its succedent disjunction, and the
  remainder is pushed under a box.
* ``ec_from_merge`` turns a derivation ending in duplicated adjacent
  components into one of the contracted hypersequent by a single Merge:
  set-valued sides make the merged component literally identical.
* ``eliminate_merge`` removes the need for Merge in the T-based
  symmetric system by structural recursion; the one interesting case is
  a left box rule applied across the merged pair, which turns into T.
* ``invert`` implements the four reduction lemmas (disjunction right,
  conjunction left, negation right, box right in the final component).
* ``proof_of_translation`` / ``proof_from_translation`` convert between
  a proof of a hypersequent and a proof of its formula translation.

Every node these functions build is re-checked against the rule
schemas; a failure raises :class:`TransformError` rather than silently
emitting an unsound derivation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import (
    CalculusSpec,
    Derivation,
    RuleApplication,
    RuleId,
    check_step,
)
from .syntax import (
    And,
    Box,
    EMPTY_SEQUENT,
    Formula,
    Hypersequent,
    Neg,
    Or,
    Sequent,
    big_and,
    big_or,
    formula_to_text,
    hypersequent_to_text,
    sorted_formulas,
)


class TransformError(ValueError):
    pass


def _node(conclusion: Hypersequent, rule: RuleId, premises, component=0,
          principal=None) -> Derivation:
    app = RuleApplication(rule, component, principal=principal)
    res = check_step(conclusion, app, [p.conclusion for p in premises])
    if not res:
        raise TransformError(
            f"internal construction error: {rule.value}@{component} "
            f"on {hypersequent_to_text(conclusion)}: {res.message}")
    return Derivation(conclusion, app, tuple(premises))


# ---------------------------------------------------------------------------
# Formula translation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TranslationResult:
    formula: Formula
    trace: tuple[str, ...]


def component_formula(s: Sequent) -> Formula:
    """The implication from the antecedent to the succedent, rendered
    without constants: an empty antecedent leaves the disjunction, an
    empty succedent leaves the negated conjunction."""
    if not s.left and not s.right:
        raise TransformError("a fully empty component has no formula rendering")
    if not s.left:
        return big_or(s.right)
    if not s.right:
        return Neg(big_and(s.left))
    return Or(Neg(big_and(s.left)), big_or(s.right))


def translate(h: Hypersequent) -> TranslationResult:
    """Right fold over the components; the tail goes under a box."""
    trace: list[str] = []
    comps = h.components
    acc = component_formula(comps[-1])
    trace.append(f"component {len(comps) - 1}: {formula_to_text(acc)}")
    for i in range(len(comps) - 2, -1, -1):
        head = component_formula(comps[i])
        trace.append(f"component {i}: {formula_to_text(head)} | boxed tail")
        acc = Or(head, Box(acc))
    return TranslationResult(acc, tuple(trace))


# ---------------------------------------------------------------------------
# EC from Merge, Merge elimination
# ---------------------------------------------------------------------------

def ec_from_merge(d: Derivation, index: int | None = None) -> Derivation:
    """Extend a derivation ending in duplicated adjacent components by a
    single Merge; since sides are sets the merged component equals each
    copy, so the result ends in the contracted hypersequent."""
    end = d.conclusion
    if index is None:
        for i in range(len(end) - 1):
            if end[i] == end[i + 1]:
                index = i
                break
        else:
            raise TransformError("end hypersequent has no duplicated adjacent component")
    if not (0 <= index <= len(end) - 2) or end[index] != end[index + 1]:
        raise TransformError(f"components {index} and {index + 1} are not duplicates")
    return _node(end.delete(index), RuleId.MERGE, [d], index)


def _merged(h: Hypersequent, i: int) -> Hypersequent:
    fused = Sequent(h[i].left | h[i + 1].left, h[i].right | h[i + 1].right)
    return h.replace(i, fused).delete(i + 1)


_RTB_POINT_RULES = {
    RuleId.TL, RuleId.TR, RuleId.NEG_L, RuleId.NEG_R,
    RuleId.AND_L1, RuleId.AND_L2, RuleId.OR_R1, RuleId.OR_R2, RuleId.T,
}


def eliminate_merge(d: Derivation, index: int) -> Derivation:
    """Derivation of the hypersequent with components ``index`` and
    ``index + 1`` merged, by induction on the input derivation.

    Input must be free of Cut, Merge and the rules outside the T-based
    symmetric system.  Point rules and the right box rule commute with
    the merge; a left box rule whose two main components are exactly the
    merged pair becomes T; all other placements reapply the rule at the
    shifted position.
    """
    e = d.conclusion
    n = len(e)
    if not 0 <= index <= n - 2:
        raise TransformError(f"no adjacent pair at index {index} in {n} components")
    rule = d.rule.rule
    target = _merged(e, index)

    if rule is RuleId.EWL:
        if index == 0:
            return d.premises[0]   # the empty component is absorbed by the union
        sub = eliminate_merge(d.premises[0], index - 1)
        return _node(target, RuleId.EWL, [sub], 0)

    if rule is RuleId.EWR:
        if index == n - 2:
            return d.premises[0]
        sub = eliminate_merge(d.premises[0], index)
        return _node(target, RuleId.EWR, [sub], len(target) - 1)

    if rule in _RTB_POINT_RULES:
        sigma = d.rule.component
        new_sigma = sigma if sigma < index else (index if sigma <= index + 1 else sigma - 1)
        sub = eliminate_merge(d.premises[0], index)
        return _node(target, rule, [sub], new_sigma, d.rule.principal)

    if rule in (RuleId.AND_R, RuleId.OR_L):
        sigma = d.rule.component
        new_sigma = sigma if sigma < index else (index if sigma <= index + 1 else sigma - 1)
        subs = [eliminate_merge(p, index) for p in d.premises]
        return _node(target, rule, subs, new_sigma, d.rule.principal)

    if rule is RuleId.BOX_R:
        sub = eliminate_merge(d.premises[0], index)
        return _node(target, RuleId.BOX_R, [sub], len(target) - 1, d.rule.principal)

    if rule is RuleId.BOX_L:
        sigma = d.rule.component
        sub = eliminate_merge(d.premises[0], index)
        if sigma == index:
            # both main components are the merged pair: the box steps
            # within one component now, which is exactly T
            return _node(target, RuleId.T, [sub], index, d.rule.principal)
        if sigma + 1 == index:
            return _node(target, RuleId.BOX_L, [sub], sigma, d.rule.principal)
        if sigma == index + 1:
            return _node(target, RuleId.BOX_L, [sub], index, d.rule.principal)
        new_sigma = sigma if sigma < index else sigma - 1
        return _node(target, RuleId.BOX_L, [sub], new_sigma, d.rule.principal)

    if rule is RuleId.SYM:
        sub = eliminate_merge(d.premises[0], n - 2 - index)
        return _node(target, RuleId.SYM, [sub], 0)

    raise TransformError(f"rule {rule.value} is outside the scope of merge elimination")


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------

def _premise_positions(d: Derivation, p: int) -> list[list[int]]:
    """Map a conclusion component index into each premise of the node."""
    rule = d.rule.rule
    sigma = d.rule.component
    n = len(d.conclusion)
    if rule is RuleId.EWL:
        return [[p - 1]] if p > 0 else [[]]
    if rule is RuleId.EWR:
        return [[p]] if p < n - 1 else [[]]
    if rule is RuleId.EW:
        if p == sigma:
            return [[]]
        return [[p]] if p < sigma else [[p - 1]]
    if rule is RuleId.EC:
        if p == sigma:
            return [[sigma, sigma + 1]]
        return [[p]] if p < sigma else [[p + 1]]
    if rule is RuleId.EE:
        if p == sigma:
            return [[sigma + 1]]
        if p == sigma + 1:
            return [[sigma]]
        return [[p]]
    if rule is RuleId.SYM:
        return [[n - 1 - p]]
    if rule in (RuleId.AND_R, RuleId.OR_L):
        return [[p], [p]]
    if rule is RuleId.CUT:
        raise TransformError("inversion requires a cut-free derivation")
    return [[p]]


def _weaken_to(sub: Derivation, target: Hypersequent) -> Derivation | None:
    """Extend with weakenings until the end equals ``target`` (same
    component count, pointwise supersets required)."""
    end = sub.conclusion
    if len(end) != len(target):
        return None
    cur = sub
    for i in range(len(target)):
        if not (end[i].left <= target[i].left and end[i].right <= target[i].right):
            return None
    for i in range(len(target)):
        for f in sorted_formulas(target[i].left - cur.conclusion[i].left):
            cur = _node(cur.conclusion.replace(i, cur.conclusion[i].add_left(f)),
                        RuleId.TL, [cur], i, f)
        for f in sorted_formulas(target[i].right - cur.conclusion[i].right):
            cur = _node(cur.conclusion.replace(i, cur.conclusion[i].add_right(f)),
                        RuleId.TR, [cur], i, f)
    return cur if cur.conclusion == target else None


def _invert_pointwise(d: Derivation, chi: Formula, which: int,
                      positions: frozenset[int]) -> Derivation:
    """Shared induction for the three pointwise inversion items."""

    def transform(s: Sequent) -> Sequent:
        if which == 1:
            return Sequent(s.left, (s.right - {chi}) | {chi.left, chi.right})
        if which == 2:
            return Sequent((s.left - {chi}) | {chi.left, chi.right}, s.right)
        return Sequent(s.left | {chi.sub}, s.right - {chi})

    def tracked_side(s: Sequent) -> frozenset:
        return s.left if which == 2 else s.right

    def go(node: Derivation, pos: frozenset[int]) -> Derivation:
        if not pos:
            return node
        for p in pos:
            if chi not in tracked_side(node.conclusion[p]):
                raise TransformError(f"tracked formula missing at component {p}")
        target = node.conclusion
        for p in pos:
            target = target.replace(p, transform(target[p]))
        maps = _premise_positions_multi(node, pos)
        subs = [go(prem, pmap) for prem, pmap in zip(node.premises, maps)]
        # first try: reapply the same rule on the transformed premises
        app = node.rule
        if subs and check_step(target, app, [s.conclusion for s in subs]):
            return Derivation(target, app, tuple(subs))
        # fallback: one transformed premise already proves the target up
        # to weakening (covers every case where the rule consumed chi)
        for s in subs:
            got = _weaken_to(s, target)
            if got is not None:
                return got
        raise TransformError(
            f"inversion stuck at {app.rule.value} on "
            f"{hypersequent_to_text(node.conclusion)}")

    def _premise_positions_multi(node: Derivation, pos: frozenset[int]) -> list[frozenset[int]]:
        per_premise: list[set[int]] = [set() for _ in node.premises]
        for p in pos:
            for k, mapped in enumerate(_premise_positions(node, p)):
                for q in mapped:
                    # only keep tracking where chi actually persists
                    if chi in tracked_side(node.premises[k].conclusion[q]):
                        per_premise[k].add(q)
        return [frozenset(s) for s in per_premise]

    return go(d, positions)


def _invert_box_last(d: Derivation, chi: Box, p: int) -> Derivation:
    """Box-right inversion: remove the boxed formula at component ``p``
    and materialise its witness component right after it."""

    def target_of(h: Hypersequent, p: int) -> Hypersequent:
        stripped = h.replace(p, h[p].remove_right(chi))
        return stripped.insert(p + 1, Sequent.make((), (chi.sub,)))

    def go(node: Derivation, p: int) -> Derivation:
        h = node.conclusion
        if chi not in h[p].right:
            raise TransformError(f"tracked box missing at component {p}")
        target = target_of(h, p)
        rule = node.rule.rule
        sigma = node.rule.component

        if rule is RuleId.BOX_R and sigma == p and node.rule.principal == chi:
            prem = node.premises[0]
            if chi not in prem.conclusion[p].right:
                return prem    # the premise is literally the target
            sub = go(prem, p)
            # context kept a copy of the box: the recursion leaves two
            # identical witness components; contract them
            return _node(target, RuleId.EC, [sub], p + 1)

        if rule is RuleId.TR and sigma == p and node.rule.principal == chi:
            prem = node.premises[0]
            if chi in prem.conclusion[p].right:
                return go(prem, p)
            widened = _node(prem.conclusion.insert(p + 1, EMPTY_SEQUENT),
                            RuleId.EW, [prem], p + 1)
            return _node(target, RuleId.TR, [widened], p + 1, chi.sub)

        mapped = _premise_positions(node, p)
        new_ps: list[int] = []
        subs: list[Derivation] = []
        for prem, qs in zip(node.premises, mapped):
            if len(qs) != 1:
                raise TransformError(
                    f"box inversion through {rule.value} with a duplicated "
                    "tracked component is not supported")
            subs.append(go(prem, qs[0]))
            new_ps.append(qs[0])
        # reapply, shifting the component index past the inserted witness
        new_sigma = sigma + 1 if sigma > p else sigma
        app = RuleApplication(rule, new_sigma, principal=node.rule.principal)
        if subs and check_step(target, app, [s.conclusion for s in subs]):
            return Derivation(target, app, tuple(subs))
        if subs and check_step(target, node.rule, [s.conclusion for s in subs]):
            return Derivation(target, node.rule, tuple(subs))
        raise TransformError(
            f"box inversion stuck at {rule.value} on "
            f"{hypersequent_to_text(node.conclusion)}")

    return go(d, p)


def invert(d: Derivation, which: int, component: int | None = None,
           principal: Formula | None = None) -> Derivation:
    """Apply one of the four inversion lemmas to a cut-free derivation.

    1: a right disjunction splits into its disjuncts;
    2: a left conjunction splits into its conjuncts;
    3: a right negation moves its body to the left;
    4: a right box in the final component becomes a trailing witness
       component (restricted to the final component).
    """
    end = d.conclusion
    if which not in (1, 2, 3, 4):
        raise TransformError("inversion item must be 1, 2, 3 or 4")
    want = {1: Or, 2: And, 3: Neg, 4: Box}[which]
    if which == 4:
        if component is not None and component != len(end) - 1:
            raise TransformError("box inversion works on the final component")
        component = len(end) - 1
    if component is None:
        for i, s in enumerate(end.components):
            side = s.left if which == 2 else s.right
            if any(isinstance(f, want) for f in side):
                component = i
                break
        else:
            raise TransformError("no component matches the requested inversion shape")
    side = end[component].left if which == 2 else end[component].right
    if principal is None:
        cands = [f for f in sorted_formulas(side) if isinstance(f, want)]
        if not cands:
            raise TransformError("no formula of the requested shape at that component")
        principal = cands[0]
    if not isinstance(principal, want) or principal not in side:
        raise TransformError("principal does not match the requested inversion shape")
    if which == 4:
        return _invert_box_last(d, principal, component)
    return _invert_pointwise(d, principal, which, frozenset({component}))


# ---------------------------------------------------------------------------
# Proofs across the translation
# ---------------------------------------------------------------------------

def _or_spine(f: Formula, pieces: list[Formula]) -> list[Formula]:
    """The nested disjunctions produced by folding ``pieces``; the last
    entry is the final piece itself."""
    spine = [f]
    cur = f
    for _ in range(len(pieces) - 1):
        assert isinstance(cur, Or)
        cur = cur.right
        spine.append(cur)
    return spine


def _fold_right_disjunction(d: Derivation, i: int, pieces: list[Formula],
                            whole: Formula) -> Derivation:
    """Forward disjunction introductions turning the set of pieces on
    the right of component ``i`` into the single right-nested formula."""
    if len(pieces) == 1:
        return d
    spine = _or_spine(whole, pieces)
    cur = d
    for level in range(len(pieces) - 2, -1, -1):
        s_j = spine[level]
        assert isinstance(s_j, Or)
        end = cur.conclusion
        step1 = end.replace(i, end[i].remove_right(s_j.left).add_right(s_j))
        cur = _node(step1, RuleId.OR_R1, [cur], i, s_j)
        end = cur.conclusion
        step2 = end.replace(i, end[i].remove_right(s_j.right))
        if step2 == end:
            continue
        cur = _node(step2, RuleId.OR_R2, [cur], i, s_j)
    return cur


def _fold_left_conjunction(d: Derivation, i: int, pieces: list[Formula],
                           whole: Formula) -> Derivation:
    if len(pieces) == 1:
        return d
    spine = _or_spine_and(whole, pieces)
    cur = d
    for level in range(len(pieces) - 2, -1, -1):
        s_j = spine[level]
        assert isinstance(s_j, And)
        end = cur.conclusion
        step1 = end.replace(i, end[i].remove_left(s_j.left).add_left(s_j))
        cur = _node(step1, RuleId.AND_L1, [cur], i, s_j)
        end = cur.conclusion
        step2 = end.replace(i, end[i].remove_left(s_j.right))
        if step2 == end:
            continue
        cur = _node(step2, RuleId.AND_L2, [cur], i, s_j)
    return cur


def _or_spine_and(f: Formula, pieces: list[Formula]) -> list[Formula]:
    spine = [f]
    cur = f
    for _ in range(len(pieces) - 1):
        assert isinstance(cur, And)
        cur = cur.right
        spine.append(cur)
    return spine


def proof_of_translation(d: Derivation, spec: CalculusSpec) -> Derivation:
    """From a proof of H, a proof of ``=> I(H)`` by connective rules."""
    if spec.name not in ("rk4", "rs4"):
        raise TransformError("the translation equivalence holds for the transitive systems only")
    h = d.conclusion
    translate(h)   # raises on fully empty components
    cur = d
    for i in range(len(h) - 1, -1, -1):
        end = cur.conclusion
        s = end[i]
        boxed = None
        if i < len(h) - 1:
            # the tail has already been folded into a single boxed formula
            boxed = next(iter(f for f in s.right if f not in h[i].right))
        gamma = sorted_formulas(h[i].left)
        if gamma:
            conj = big_and(h[i].left)
            cur = _fold_left_conjunction(cur, i, gamma, conj)
            end = cur.conclusion
            cur = _node(end.replace(i, Sequent(end[i].left - {conj},
                                               end[i].right | {Neg(conj)})),
                        RuleId.NEG_R, [cur], i, Neg(conj))
        comp = component_formula(h[i])
        if h[i].right:
            delta_pieces = sorted_formulas(h[i].right)
            delta_whole = big_or(h[i].right)
            cur = _fold_right_disjunction(cur, i, delta_pieces, delta_whole)
            if gamma:
                end = cur.conclusion
                step1 = end.replace(i, end[i].remove_right(Neg(big_and(h[i].left))).add_right(comp))
                cur = _node(step1, RuleId.OR_R1, [cur], i, comp)
                end = cur.conclusion
                step2 = end.replace(i, end[i].remove_right(delta_whole))
                if step2 != end:
                    cur = _node(step2, RuleId.OR_R2, [cur], i, comp)
        if boxed is not None:
            full = Or(comp, boxed)
            end = cur.conclusion
            step1 = end.replace(i, end[i].remove_right(comp).add_right(full))
            cur = _node(step1, RuleId.OR_R1, [cur], i, full)
            end = cur.conclusion
            step2 = end.replace(i, end[i].remove_right(boxed))
            if step2 != end:
                cur = _node(step2, RuleId.OR_R2, [cur], i, full)
        if i > 0:
            end = cur.conclusion
            inner = next(iter(end[i].right))
            prev = end[i - 1]
            concl = Hypersequent(end.components[:i - 1] + (prev.add_right(Box(inner)),))
            cur = _node(concl, RuleId.BOX_R, [cur], i - 1, Box(inner))
    return cur


def proof_from_translation(d: Derivation, target: Hypersequent) -> Derivation:
    """From a proof of ``=> I(target)``, a proof of ``target`` by the
    inversion lemmas, unfolding one component per round."""
    expected = translate(target).formula
    end = d.conclusion
    if len(end) != 1 or end[0].left or end[0].right != frozenset({expected}):
        raise TransformError("input does not prove the formula translation of the target")
    cur = d
    n = len(target)
    for i in range(n - 1):
        # the final component currently carries component_i | boxed-tail
        f = cur.conclusion[i].right
        whole = next(iter(f))
        assert isinstance(whole, Or)
        cur = invert(cur, 1, component=i, principal=whole)
        boxed = whole.right
        assert isinstance(boxed, Box)
        cur = invert(cur, 4, principal=boxed)
        # drop the now-split head piece down to the component shape
        cur = _unfold_component(cur, i, target[i])
    cur = _unfold_component(cur, n - 1, target[n - 1])
    if cur.conclusion != target:
        raise TransformError("inversion did not reach the target hypersequent")
    return cur


def _unfold_component(cur: Derivation, i: int, goal: Sequent) -> Derivation:
    comp = component_formula(goal)
    if goal.left and goal.right:
        assert isinstance(comp, Or)
        cur = invert(cur, 1, component=i, principal=comp)
    if goal.right:
        pieces = sorted_formulas(goal.right)
        whole = big_or(goal.right)
        for f in _or_spine(whole, pieces)[:-1]:
            cur = invert(cur, 1, component=i, principal=f)
    if goal.left:
        conj = big_and(goal.left)
        cur = invert(cur, 3, component=i, principal=Neg(conj))
        pieces = sorted_formulas(goal.left)
        for f in _or_spine_and(conj, pieces)[:-1]:
            cur = invert(cur, 2, component=i, principal=f)
    return cur
