"""Rule schemas, named calculi, derivation trees and the proof checker.

A derivation is a tree whose leaves are instances of the axiom ``Id``
(``p => p`` for an atom ``p``) and whose inner nodes each apply one rule
schema.  ``check_step`` verifies a single node against its schema;
``check_derivation`` walks a whole tree and additionally enforces the
rule set of a named calculus.

Component indexes are 0-based throughout, including the JSON format.
Sequent sides are sets, so every schema is checked up to the absorbing
behaviour of set union (an introduced formula may coincide with one
already present in the context).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

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
    formula_from_data,
    formula_to_data,
    formula_to_text,
    hypersequent_from_data,
    hypersequent_to_data,
    hypersequent_to_text,
)


class RuleId(enum.Enum):
    ID = "Id"
    CUT = "Cut"
    EWL = "EWL"
    EWR = "EWR"
    TL = "TL"
    TR = "TR"
    BOX_R = "BoxR"
    BOX_L = "BoxL"
    NEG_L = "NegL"
    NEG_R = "NegR"
    AND_L1 = "AndL1"
    AND_L2 = "AndL2"
    AND_R = "AndR"
    OR_L = "OrL"
    OR_R1 = "OrR1"
    OR_R2 = "OrR2"
    EC = "EC"
    SYM = "Sym"
    EW = "EW"
    EE = "EE"
    DROP = "Drop"
    T = "T"
    MERGE = "Merge"


@dataclass(frozen=True)
class RuleApplication:
    rule: RuleId
    component: int = 0
    aux: Optional[int] = None
    principal: Optional[Formula] = None
    side: Optional[str] = None


@dataclass(frozen=True)
class Derivation:
    conclusion: Hypersequent
    rule: RuleApplication
    premises: tuple["Derivation", ...] = ()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)


# ---------------------------------------------------------------------------
# Named calculi
# ---------------------------------------------------------------------------

_RK_RULES = frozenset({
    RuleId.ID, RuleId.CUT, RuleId.EWL, RuleId.EWR, RuleId.TL, RuleId.TR,
    RuleId.BOX_R, RuleId.BOX_L, RuleId.NEG_L, RuleId.NEG_R,
    RuleId.AND_L1, RuleId.AND_L2, RuleId.AND_R,
    RuleId.OR_L, RuleId.OR_R1, RuleId.OR_R2,
})

SYSTEM_EXTRAS: dict[str, frozenset[RuleId]] = {
    "rk": frozenset(),
    "rd": frozenset({RuleId.DROP}),
    "rt": frozenset({RuleId.EC}),
    "rkb": frozenset({RuleId.SYM}),
    "rk4": frozenset({RuleId.EW}),
    "rb": frozenset({RuleId.EC, RuleId.SYM}),
    "rs4": frozenset({RuleId.EC, RuleId.EW}),
    "rs5": frozenset({RuleId.EC, RuleId.EW, RuleId.EE}),
    "rtb": frozenset({RuleId.T, RuleId.SYM}),
}


@dataclass(frozen=True)
class CalculusSpec:
    """A named rule set plus a Cut toggle."""

    name: str
    rules: frozenset[RuleId]
    cut_enabled: bool = False

    @staticmethod
    def named(name: str, cut_enabled: bool = False) -> "CalculusSpec":
        key = name.lower()
        if key not in SYSTEM_EXTRAS:
            raise ValueError(f"unknown system {name!r}; choose from {sorted(SYSTEM_EXTRAS)}")
        return CalculusSpec(key, _RK_RULES | SYSTEM_EXTRAS[key], cut_enabled)

    def with_rules(self, extra: Iterable[RuleId]) -> "CalculusSpec":
        return CalculusSpec(self.name, self.rules | frozenset(extra), self.cut_enabled)

    def allows(self, rule: RuleId) -> bool:
        if rule is RuleId.CUT:
            return self.cut_enabled and rule in self.rules
        return rule in self.rules


# ---------------------------------------------------------------------------
# Step checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepResult:
    ok: bool
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(msg: str) -> StepResult:
    return StepResult(False, msg)


_OK = StepResult(True)


def _match_intro(conclusion_side: frozenset, premise_side: frozenset,
                 removed: Formula, added: Formula) -> bool:
    """Does some context G satisfy G + removed == premise, G + added == conclusion?"""
    if removed not in premise_side:
        return False
    for g in (premise_side - {removed}, premise_side):
        if g | {added} == conclusion_side:
            return True
    return False


def _others_equal(concl: Hypersequent, prem: Hypersequent, skip: set[int]) -> bool:
    if len(concl) != len(prem):
        return False
    return all(concl[i] == prem[i] for i in range(len(concl)) if i not in skip)


def check_step(conclusion: Hypersequent, app: RuleApplication,
               premises: list[Hypersequent]) -> StepResult:
    """Check one rule application against its schema."""
    rule = app.rule
    sigma = app.component
    n = len(conclusion)
    expected = 0 if rule is RuleId.ID else (2 if rule in (RuleId.CUT, RuleId.AND_R, RuleId.OR_L) else 1)
    if len(premises) != expected:
        return _fail(f"{rule.value} takes {expected} premises, got {len(premises)}")
    if rule is not RuleId.ID and not (0 <= sigma < n):
        return _fail(f"component index {sigma} out of range for {n} components")

    if rule is RuleId.ID:
        if n != 1:
            return _fail("Id concludes a single component")
        s = conclusion[0]
        if len(s.left) == 1 and s.left == s.right and isinstance(next(iter(s.left)), Atom):
            return _OK
        return _fail("Id requires the conclusion p => p for an atom p")

    if rule is RuleId.CUT:
        phi = app.principal
        if phi is None:
            return _fail("Cut requires its cut formula as principal")
        p1, p2 = premises
        if not (_others_equal(conclusion, p1, {sigma}) and _others_equal(conclusion, p2, {sigma})):
            return _fail("Cut premises must share all side components with the conclusion")
        c = conclusion[sigma]
        if p1[sigma] != Sequent(c.left, c.right | {phi}):
            return _fail("first Cut premise must add the cut formula on the right")
        if p2[sigma] != Sequent(c.left | {phi}, c.right):
            return _fail("second Cut premise must add the cut formula on the left")
        return _OK

    if rule is RuleId.EWL:
        p = premises[0]
        if n < 2 or not conclusion[0].is_empty():
            return _fail("EWL requires a leading empty component and >= 2 components")
        if p.components != conclusion.components[1:]:
            return _fail("EWL premise must be the conclusion minus its leading empty component")
        return _OK

    if rule is RuleId.EWR:
        p = premises[0]
        if n < 2 or not conclusion[n - 1].is_empty():
            return _fail("EWR requires a trailing empty component and >= 2 components")
        if p.components != conclusion.components[:-1]:
            return _fail("EWR premise must be the conclusion minus its trailing empty component")
        return _OK

    if rule is RuleId.EW:
        p = premises[0]
        if n < 2 or not conclusion[sigma].is_empty():
            return _fail("EW requires an empty component at the given index")
        if p.components != conclusion.delete(sigma).components:
            return _fail("EW premise must be the conclusion minus the inserted empty component")
        return _OK

    if rule in (RuleId.TL, RuleId.TR):
        phi = app.principal
        if phi is None:
            return _fail(f"{rule.value} requires a principal formula")
        p = premises[0]
        if not _others_equal(conclusion, p, {sigma}):
            return _fail("side components must be untouched")
        c, q = conclusion[sigma], p[sigma]
        if rule is RuleId.TL:
            if phi in c.left and q.right == c.right and q.left | {phi} == c.left:
                return _OK
            return _fail("TL premise must be the conclusion minus the weakened formula on the left")
        if phi in c.right and q.left == c.left and q.right | {phi} == c.right:
            return _OK
        return _fail("TR premise must be the conclusion minus the weakened formula on the right")

    if rule is RuleId.BOX_R:
        phi = app.principal
        if not isinstance(phi, Box):
            return _fail("BoxR requires a boxed principal formula")
        if sigma != n - 1:
            return _fail("BoxR introduces its box in the last component")
        p = premises[0]
        if len(p) != n + 1:
            return _fail("BoxR premise has one extra component")
        if p.components[:n - 1] != conclusion.components[:n - 1]:
            return _fail("BoxR must not touch earlier components")
        c, q = conclusion[n - 1], p[n - 1]
        if phi not in c.right or q.left != c.left or q.right | {phi} != c.right:
            return _fail("BoxR conclusion must add the boxed formula to the right of its component")
        if p[n] != Sequent(frozenset(), frozenset({phi.sub})):
            return _fail("BoxR premise must end with the component => phi")
        return _OK

    if rule is RuleId.BOX_L:
        phi = app.principal
        if not isinstance(phi, Box):
            return _fail("BoxL requires a boxed principal formula")
        if sigma > n - 2:
            return _fail("BoxL requires a component after the left-main one")
        p = premises[0]
        if not _others_equal(conclusion, p, {sigma, sigma + 1}):
            return _fail("BoxL must only touch the left-main and right-main components")
        c, q = conclusion[sigma], p[sigma]
        if phi not in c.left or q.right != c.right or q.left | {phi} != c.left:
            return _fail("BoxL conclusion must add the box on the left of the left-main component")
        c1, q1 = conclusion[sigma + 1], p[sigma + 1]
        if q1.left != c1.left | {phi.sub} or q1.right != c1.right:
            return _fail("BoxL premise must carry the unboxed formula in the right-main component")
        return _OK

    if rule in (RuleId.NEG_L, RuleId.NEG_R):
        phi = app.principal
        if not isinstance(phi, Neg):
            return _fail(f"{rule.value} requires a negated principal formula")
        p = premises[0]
        if not _others_equal(conclusion, p, {sigma}):
            return _fail("side components must be untouched")
        c, q = conclusion[sigma], p[sigma]
        if rule is RuleId.NEG_L:
            if phi in c.left and q.left | {phi} == c.left and q.right == c.right | {phi.sub}:
                return _OK
            return _fail("NegL premise must move the negatum to the right")
        if phi in c.right and q.right | {phi} == c.right and q.left == c.left | {phi.sub}:
            return _OK
        return _fail("NegR premise must move the negatum to the left")

    if rule in (RuleId.AND_L1, RuleId.AND_L2):
        phi = app.principal
        if not isinstance(phi, And):
            return _fail(f"{rule.value} requires a conjunctive principal formula")
        p = premises[0]
        if not _others_equal(conclusion, p, {sigma}):
            return _fail("side components must be untouched")
        c, q = conclusion[sigma], p[sigma]
        part = phi.left if rule is RuleId.AND_L1 else phi.right
        if q.right == c.right and _match_intro(c.left, q.left, part, phi):
            return _OK
        return _fail("premise must contain the chosen conjunct on the left")

    if rule is RuleId.AND_R:
        phi = app.principal
        if not isinstance(phi, And):
            return _fail("AndR requires a conjunctive principal formula")
        p1, p2 = premises
        if not (_others_equal(conclusion, p1, {sigma}) and _others_equal(conclusion, p2, {sigma})):
            return _fail("side components must be untouched")
        c = conclusion[sigma]
        if p1[sigma].left != c.left or p2[sigma].left != c.left:
            return _fail("AndR premises must keep the antecedent")
        for delta in (c.right - {phi}, c.right):
            if (delta | {phi} == c.right
                    and p1[sigma].right == delta | {phi.left}
                    and p2[sigma].right == delta | {phi.right}):
                return _OK
        return _fail("AndR premises must add the two conjuncts to a shared succedent")

    if rule is RuleId.OR_L:
        phi = app.principal
        if not isinstance(phi, Or):
            return _fail("OrL requires a disjunctive principal formula")
        p1, p2 = premises
        if not (_others_equal(conclusion, p1, {sigma}) and _others_equal(conclusion, p2, {sigma})):
            return _fail("side components must be untouched")
        c = conclusion[sigma]
        if p1[sigma].right != c.right or p2[sigma].right != c.right:
            return _fail("OrL premises must keep the succedent")
        for gamma in (c.left - {phi}, c.left):
            if (gamma | {phi} == c.left
                    and p1[sigma].left == gamma | {phi.left}
                    and p2[sigma].left == gamma | {phi.right}):
                return _OK
        return _fail("OrL premises must add the two disjuncts to a shared antecedent")

    if rule in (RuleId.OR_R1, RuleId.OR_R2):
        phi = app.principal
        if not isinstance(phi, Or):
            return _fail(f"{rule.value} requires a disjunctive principal formula")
        p = premises[0]
        if not _others_equal(conclusion, p, {sigma}):
            return _fail("side components must be untouched")
        c, q = conclusion[sigma], p[sigma]
        part = phi.left if rule is RuleId.OR_R1 else phi.right
        if q.left == c.left and _match_intro(c.right, q.right, part, phi):
            return _OK
        return _fail("premise must contain the chosen disjunct on the right")

    if rule is RuleId.EC:
        p = premises[0]
        if len(p) != n + 1:
            return _fail("EC premise has one extra component")
        if (p.components[:sigma] == conclusion.components[:sigma]
                and p[sigma] == conclusion[sigma] and p[sigma + 1] == conclusion[sigma]
                and p.components[sigma + 2:] == conclusion.components[sigma + 1:]):
            return _OK
        return _fail("EC premise must duplicate the contracted component adjacently")

    if rule is RuleId.SYM:
        p = premises[0]
        if p.components == tuple(reversed(conclusion.components)):
            return _OK
        return _fail("Sym premise must be the full reversal of the conclusion")

    if rule is RuleId.EE:
        if sigma > n - 2:
            return _fail("EE needs two adjacent components")
        p = premises[0]
        if p.components == conclusion.swap(sigma).components:
            return _OK
        return _fail("EE premise must swap the two adjacent components")

    if rule is RuleId.DROP:
        p = premises[0]
        if p.components == conclusion.components + (EMPTY_SEQUENT,):
            return _OK
        return _fail("Drop premise must be the conclusion plus a trailing empty component")

    if rule is RuleId.T:
        phi = app.principal
        if not isinstance(phi, Box):
            return _fail("T requires a boxed principal formula")
        p = premises[0]
        if not _others_equal(conclusion, p, {sigma}):
            return _fail("side components must be untouched")
        c, q = conclusion[sigma], p[sigma]
        if q.right == c.right and _match_intro(c.left, q.left, phi.sub, phi):
            return _OK
        return _fail("T premise must contain the unboxed formula on the left")

    if rule is RuleId.MERGE:
        p = premises[0]
        if len(p) != n + 1:
            return _fail("Merge premise has one extra component")
        if (p.components[:sigma] == conclusion.components[:sigma]
                and p.components[sigma + 2:] == conclusion.components[sigma + 1:]
                and p[sigma].left | p[sigma + 1].left == conclusion[sigma].left
                and p[sigma].right | p[sigma + 1].right == conclusion[sigma].right):
            return _OK
        return _fail("Merge premise components must union to the merged component")

    return _fail(f"unknown rule {rule!r}")


# ---------------------------------------------------------------------------
# Derivation checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivationResult:
    ok: bool
    path: tuple[int, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_derivation(d: Derivation, spec: CalculusSpec) -> DerivationResult:
    """Check every node; reports the premise path to the first failure."""
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        if not spec.allows(node.rule.rule):
            why = "Cut is disabled" if node.rule.rule is RuleId.CUT else "rule not in this calculus"
            return DerivationResult(False, path, f"{node.rule.rule.value}: {why}")
        res = check_step(node.conclusion, node.rule, [p.conclusion for p in node.premises])
        if not res:
            return DerivationResult(
                False, path,
                f"{node.rule.rule.value} at {hypersequent_to_text(node.conclusion)}: {res.message}")
        for i, p in enumerate(node.premises):
            stack.append((p, path + (i,)))
    return DerivationResult(True)


def conclusions_of(d: Derivation) -> list[Hypersequent]:
    out = []
    stack = [d]
    while stack:
        node = stack.pop()
        out.append(node.conclusion)
        stack.extend(node.premises)
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def derivation_to_data(d: Derivation) -> dict:
    rule: dict[str, object] = {"id": d.rule.rule.value, "component": d.rule.component}
    if d.rule.aux is not None:
        rule["aux"] = d.rule.aux
    if d.rule.principal is not None:
        rule["principal"] = formula_to_data(d.rule.principal)
    if d.rule.side is not None:
        rule["side"] = d.rule.side
    return {
        "conclusion": hypersequent_to_data(d.conclusion),
        "rule": rule,
        "premises": [derivation_to_data(p) for p in d.premises],
    }


def derivation_from_data(data: dict) -> Derivation:
    rule = data["rule"]
    app = RuleApplication(
        rule=RuleId(rule["id"]),
        component=rule.get("component", 0),
        aux=rule.get("aux"),
        principal=formula_from_data(rule["principal"]) if "principal" in rule else None,
        side=rule.get("side"),
    )
    return Derivation(
        conclusion=hypersequent_from_data(data["conclusion"]),
        rule=app,
        premises=tuple(derivation_from_data(p) for p in data["premises"]),
    )


def describe_app(app: RuleApplication) -> str:
    parts = [app.rule.value, f"@{app.component}"]
    if app.principal is not None:
        parts.append(formula_to_text(app.principal))
    return " ".join(parts)
