"""Named formulas, hypersequents and golden derivations used throughout.

``C`` is the single-formula hypersequent that is valid on transitive (and
reflexive-transitive) frames yet has no cut-free proof in the matching
hypersequent systems; ``J`` is its three-component analogue for symmetric
frames.  The constructors below build the shipped golden derivations
node by node; the JSON files under ``data/`` are frozen copies.
"""

from __future__ import annotations

import json
from importlib import resources

from .calculus import Derivation, RuleApplication, RuleId, derivation_from_data
from .syntax import (
    And,
    Atom,
    Box,
    Formula,
    Hypersequent,
    Neg,
    Or,
    Sequent,
    parse_formula,
    parse_hypersequent,
)

P = Atom("p")
Q = Atom("q")

#: The formula whose validity on transitive frames has no cut-free proof:
#: ~[]~[](p & q) | [](~[]p | []~[]q)
C_FORMULA: Formula = parse_formula("~[]~[](p & q) | []( ~[]p | []~[]q )")

#: C as a single-component hypersequent  => C_FORMULA
C = Hypersequent.make([Sequent.make((), (C_FORMULA,))])

#: The three-component hypersequent whose formula translation is C:
#: []~[](p&q) => // []p => // []q =>
C_UNDERLYING = parse_hypersequent("[]~[](p&q) => // []p => // []q =>")

#: Body of J's middle component: [](~[][]p & ~[][]q)
J_BODY: Formula = parse_formula("[](~[][]p & ~[][]q)")

#: The hypersequent valid on symmetric (and reflexive-symmetric) frames that
#: has no cut-free proof in the matching systems:
#: => p // => [](~[][]p & ~[][]q) // => q
J = parse_hypersequent("=> p // => [](~[][]p & ~[][]q) // => q")

#: The box-distributed variant of J, which *is* provable:
#: => p // => []~[][]p & []~[][]q // => q
J_PRIME = parse_hypersequent("=> p // => []~[][]p & []~[][]q // => q")

#: Box-distribution sequents instantiated at phi = ~[][]p, psi = ~[][]q.
DIST_PHI: Formula = parse_formula("~[][]p")
DIST_PSI: Formula = parse_formula("~[][]q")
BOX_DISTRIBUTION = parse_hypersequent("[]~[][]p & []~[][]q => [](~[][]p & ~[][]q)")
BOX_DISTRIBUTION_CONVERSE = parse_hypersequent("[](~[][]p & ~[][]q) => []~[][]p & []~[][]q")


def _seq(left=(), right=()):
    return Sequent.make(left, right)


def _hyp(*seqs):
    return Hypersequent.make(seqs)


def _node(conclusion, rule, premises=(), component=0, principal=None):
    return Derivation(conclusion, RuleApplication(rule, component, principal=principal),
                      tuple(premises))


def ij_translation_derivation() -> Derivation:
    """The shipped derivation of ``=> I(J)`` in cut-free RKB.

    I(J) = p | [](  [](~[][]p & ~[][]q) | []q  ).
    """
    bbp, bbq = Box(Box(P)), Box(Box(Q))
    nbbp, nbbq = Neg(bbp), Neg(bbq)
    conj = And(nbbp, nbbq)
    d = Box(conj)
    inner = Or(d, Box(Q))
    top = Or(P, Box(inner))

    # left branch: ends in  => p // => []q // => ~[][]p
    l1 = _node(_hyp(_seq([P], [P])), RuleId.ID)
    l2 = _node(_hyp(_seq(), _seq([P], [P])), RuleId.EWL, [l1])
    l3 = _node(_hyp(_seq(), _seq(), _seq([P], [P])), RuleId.EWL, [l2])
    l4 = _node(_hyp(_seq(), _seq([Box(P)]), _seq((), [P])), RuleId.BOX_L, [l3],
               component=1, principal=Box(P))
    l5 = _node(_hyp(_seq([bbp]), _seq(), _seq((), [P])), RuleId.BOX_L, [l4],
               component=0, principal=bbp)
    l6 = _node(_hyp(_seq((), [P]), _seq(), _seq([bbp])), RuleId.SYM, [l5])
    l7 = _node(_hyp(_seq((), [P]), _seq(), _seq((), [nbbp])), RuleId.NEG_R, [l6],
               component=2, principal=nbbp)
    l8 = _node(_hyp(_seq((), [P]), _seq((), [Box(Q)]), _seq((), [nbbp])), RuleId.TR, [l7],
               component=1, principal=Box(Q))

    # right branch: ends in  => p // => []q // => ~[][]q
    r1 = _node(_hyp(_seq([Q], [Q])), RuleId.ID)
    r2 = _node(_hyp(_seq(), _seq([Q], [Q])), RuleId.EWL, [r1])
    r3 = _node(_hyp(_seq([Box(Q)]), _seq((), [Q])), RuleId.BOX_L, [r2],
               component=0, principal=Box(Q))
    r4 = _node(_hyp(_seq([Box(Q)], [Box(Q)])), RuleId.BOX_R, [r3],
               component=0, principal=Box(Q))
    r5 = _node(_hyp(_seq(), _seq([Box(Q)], [Box(Q)])), RuleId.EWL, [r4])
    r6 = _node(_hyp(_seq([bbq]), _seq((), [Box(Q)])), RuleId.BOX_L, [r5],
               component=0, principal=bbq)
    r7 = _node(_hyp(_seq((), [Box(Q)]), _seq([bbq])), RuleId.SYM, [r6])
    r8 = _node(_hyp(_seq((), [Box(Q)]), _seq((), [nbbq])), RuleId.NEG_R, [r7],
               component=1, principal=nbbq)
    r9 = _node(_hyp(_seq(), _seq((), [Box(Q)]), _seq((), [nbbq])), RuleId.EWL, [r8])
    r10 = _node(_hyp(_seq((), [P]), _seq((), [Box(Q)]), _seq((), [nbbq])), RuleId.TR, [r9],
                component=0, principal=P)

    m1 = _node(_hyp(_seq((), [P]), _seq((), [Box(Q)]), _seq((), [conj])), RuleId.AND_R,
               [l8, r10], component=2, principal=conj)
    m2 = _node(_hyp(_seq((), [P]), _seq((), [Box(Q), d])), RuleId.BOX_R, [m1],
               component=1, principal=d)
    m3 = _node(_hyp(_seq((), [P]), _seq((), [Box(Q), inner])), RuleId.OR_R1, [m2],
               component=1, principal=inner)
    m4 = _node(_hyp(_seq((), [P]), _seq((), [inner])), RuleId.OR_R2, [m3],
               component=1, principal=inner)
    m5 = _node(_hyp(_seq((), [P, Box(inner)])), RuleId.BOX_R, [m4],
               component=0, principal=Box(inner))
    m6 = _node(_hyp(_seq((), [P, top])), RuleId.OR_R2, [m5], component=0, principal=top)
    m7 = _node(_hyp(_seq((), [top])), RuleId.OR_R1, [m6], component=0, principal=top)
    return m7


def boxlprime_simulation_derivation() -> Derivation:
    """A concrete instance of simulating the long-range box reduction with Cut.

    Shows that adding the unboxed formula to a *distant* later component is
    reversible in RK4 with Cut: the conclusion []p => // => // => p is
    recovered from the reduct []p => // => // p => p.
    """
    a1 = _node(_hyp(_seq([P], [P])), RuleId.ID)
    a2 = _node(_hyp(_seq(), _seq([P], [P])), RuleId.EWL, [a1])
    a3 = _node(_hyp(_seq(), _seq(), _seq([P], [P])), RuleId.EWL, [a2])
    a4 = _node(_hyp(_seq([Box(P)]), _seq(), _seq([P], [P])), RuleId.TL, [a3],
               component=0, principal=Box(P))

    b1 = _node(_hyp(_seq([P], [P])), RuleId.ID)
    b2 = _node(_hyp(_seq(), _seq([P], [P])), RuleId.EWL, [b1])
    b3 = _node(_hyp(_seq([Box(P)]), _seq((), [P])), RuleId.BOX_L, [b2],
               component=0, principal=Box(P))
    b4 = _node(_hyp(_seq([Box(P)]), _seq(), _seq((), [P])), RuleId.EW, [b3], component=1)

    return _node(_hyp(_seq([Box(P)]), _seq(), _seq((), [P])), RuleId.CUT, [b4, a4],
                 component=2, principal=P)


_GOLDEN_FILES = {
    "ij_translation": "ij_translation.json",
    "boxlprime_simulation": "boxlprime_simulation.json",
    "box_distribution": "box_distribution.json",
    "box_distribution_converse": "box_distribution_converse.json",
}


def load_golden(name: str) -> Derivation:
    """Load one of the shipped golden derivation files."""
    if name not in _GOLDEN_FILES:
        raise KeyError(f"unknown golden derivation {name!r}; choose from {sorted(_GOLDEN_FILES)}")
    text = resources.files("hyperseq.data").joinpath(_GOLDEN_FILES[name]).read_text()
    return derivation_from_data(json.loads(text))
