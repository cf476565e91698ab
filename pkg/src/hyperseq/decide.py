"""Saturation-based decision procedure for the transitive-frame systems
with Cut, with Kripke countermodel extraction on open saturations.

The goal's components are labelled left to right and form the spine of
a growing graph of labelled sequents.  Reduction only ever adds
formulas to a node or adds nodes/edges (monotone saturation):

* negations and conjunctions/disjunctions decompose in place, with the
  two-premise shapes (conjunction on the right, disjunction on the
  left) explored as genuine branch choices;
* a boxed formula on the left propagates its body to every node
  reachable through the transitive closure of the edges - for the
  reflexive system also to its own node - which is the long-range
  reading of the left box rule that Cut makes unprovability-safe;
* a boxed formula on the right needs a reachable node falsifying its
  body; the procedure either reuses one, adds a loop edge back to the
  nearest ancestor already falsifying it, or grows a fresh child.  Loop
  edges keep saturation finite on cyclic demands; both resolutions are
  explored, loop first.

A branch closes when some node shares a formula between its two sides
(an atom clash is the base case; compound clashes are sound because
``f => f`` is derivable for every ``f``).  If every branch closes the
goal is valid; the first open saturated branch instead extracts a
countermodel: worlds are labels, the relation is the transitive
closure of the edges (reflexive-transitive for the reflexive system),
an atom is true where it sits on the left, and the branch is the
spine.  Every extracted model is re-checked against the goal before it
is reported, so an "invalid" verdict is machine-verified
unconditionally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .kripke import KripkeFrame, KripkeModel, evaluate
from .syntax import (
    And,
    Atom,
    Box,
    Formula,
    Hypersequent,
    Neg,
    Or,
    formula_to_text,
    hypersequent_to_text,
    sorted_formulas,
)

SYSTEMS = ("rk4cut", "rs4cut")


@dataclass(frozen=True)
class DecideLimits:
    max_nodes: int = 32
    max_states: int = 20000


@dataclass
class SaturationState:
    gammas: dict[str, set[Formula]]
    deltas: dict[str, set[Formula]]
    edges: set[tuple[str, str]]
    order: list[str]
    parent: dict[str, Optional[str]]
    spine: tuple[str, ...]
    reflexive: bool
    counter: int = 0
    decisions: tuple[str, ...] = ()

    def clone(self) -> "SaturationState":
        return SaturationState(
            gammas={k: set(v) for k, v in self.gammas.items()},
            deltas={k: set(v) for k, v in self.deltas.items()},
            edges=set(self.edges),
            order=list(self.order),
            parent=dict(self.parent),
            spine=self.spine,
            reflexive=self.reflexive,
            counter=self.counter,
            decisions=self.decisions,
        )

    def cone(self, x: str) -> set[str]:
        """Nodes reachable from x through the edges; includes x itself
        exactly when the system is reflexive or x lies on a cycle."""
        out: set[str] = set()
        frontier = [y for a, y in self.edges if a == x]
        while frontier:
            y = frontier.pop()
            if y in out:
                continue
            out.add(y)
            frontier.extend(z for a, z in self.edges if a == y)
        if self.reflexive:
            out.add(x)
        return out

    def ancestors(self, x: str) -> Iterator[str]:
        cur: Optional[str] = x
        while cur is not None:
            yield cur
            cur = self.parent[cur]


@dataclass
class SaturationOutcome:
    status: str                       # "closed" | "open" | "unknown"
    goal: Hypersequent
    system: str
    open_state: Optional[SaturationState] = None
    closures: list[dict] = field(default_factory=list)
    states_explored: int = 0

    def certificate(self) -> dict:
        from .syntax import hypersequent_to_data

        return {
            "goal": hypersequent_to_data(self.goal),
            "system": self.system,
            "status": self.status,
            "branches": self.closures,
            "states_explored": self.states_explored,
        }


def _initial_state(goal: Hypersequent, system: str) -> SaturationState:
    labels = tuple(f"c{i}" for i in range(len(goal)))
    st = SaturationState(
        gammas={lab: set(s.left) for lab, s in zip(labels, goal.components)},
        deltas={lab: set(s.right) for lab, s in zip(labels, goal.components)},
        edges={(labels[i], labels[i + 1]) for i in range(len(labels) - 1)},
        order=list(labels),
        parent={labels[0]: None, **{labels[i + 1]: labels[i] for i in range(len(labels) - 1)}},
        spine=labels,
        reflexive=(system == "rs4cut"),
    )
    return st


def saturate(goal: Hypersequent, system: str,
             limits: Optional[DecideLimits] = None) -> SaturationOutcome:
    """Run the reduction to saturation on every branch.

    Returns ``closed`` with a replayable certificate when all branches
    close, ``open`` with the first fully saturated branch otherwise,
    and ``unknown`` if a node or state budget was exhausted first.
    """
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; choose from {SYSTEMS}")
    limits = limits or DecideLimits()
    outcome = SaturationOutcome("unknown", goal, system)
    stack = [_initial_state(goal, system)]
    budget_hit = False
    while stack:
        outcome.states_explored += 1
        if outcome.states_explored > limits.max_states:
            budget_hit = True
            break
        st = stack.pop()
        step = _saturate_one(st, limits)
        if step[0] == "closed":
            outcome.closures.append({
                "decisions": list(st.decisions),
                "closure": {"node": step[1], "formula": formula_to_text(step[2])},
            })
            continue
        if step[0] == "open":
            outcome.status = "open"
            outcome.open_state = st
            return outcome
        if step[0] == "budget":
            budget_hit = True
            continue
        # fork: push alternatives, first choice on top
        for alt in reversed(step[1]):
            stack.append(alt)
    outcome.status = "unknown" if budget_hit else "closed"
    return outcome


def _saturate_one(st: SaturationState, limits: DecideLimits):
    while True:
        for x in st.order:
            shared = st.gammas[x] & st.deltas[x]
            if shared:
                f = sorted_formulas(shared)[0]
                return "closed", x, f
        if _deterministic_pass(st):
            continue
        fork = _branch_choice(st)
        if fork is not None:
            return "fork", fork
        need = _witness_need(st)
        if need is None:
            return ("open",)
        x, g = need
        alts: list[SaturationState] = []
        for tau in st.ancestors(x):
            if g in st.deltas[tau]:
                looped = st.clone()
                looped.edges.add((x, tau))
                looped.decisions += (f"loop {x}->{tau} for []{formula_to_text(g)}",)
                alts.append(looped)
                break
        if len(st.order) < limits.max_nodes:
            grown = st.clone()
            label = f"x{grown.counter}"
            grown.counter += 1
            grown.gammas[label] = set()
            grown.deltas[label] = {g}
            grown.order.append(label)
            grown.parent[label] = x
            grown.edges.add((x, label))
            grown.decisions += (f"grow {label} under {x} for []{formula_to_text(g)}",)
            alts.append(grown)
        if not alts:
            return ("budget",)
        if len(alts) == 1:
            # No real choice: continue in place on the single successor.
            st.gammas = alts[0].gammas
            st.deltas = alts[0].deltas
            st.edges = alts[0].edges
            st.order = alts[0].order
            st.parent = alts[0].parent
            st.counter = alts[0].counter
            st.decisions = alts[0].decisions
            continue
        return "fork", alts


def _deterministic_pass(st: SaturationState) -> bool:
    changed = False
    for x in list(st.order):
        for f in sorted_formulas(st.gammas[x]):
            if isinstance(f, Neg) and f.sub not in st.deltas[x]:
                st.deltas[x].add(f.sub)
                changed = True
            elif isinstance(f, And):
                for part in (f.left, f.right):
                    if part not in st.gammas[x]:
                        st.gammas[x].add(part)
                        changed = True
            elif isinstance(f, Box):
                for y in st.cone(x):
                    if f.sub not in st.gammas[y]:
                        st.gammas[y].add(f.sub)
                        changed = True
        for f in sorted_formulas(st.deltas[x]):
            if isinstance(f, Neg) and f.sub not in st.gammas[x]:
                st.gammas[x].add(f.sub)
                changed = True
            elif isinstance(f, Or):
                for part in (f.left, f.right):
                    if part not in st.deltas[x]:
                        st.deltas[x].add(part)
                        changed = True
    return changed


def _branch_choice(st: SaturationState) -> Optional[list[SaturationState]]:
    for x in st.order:
        for f in sorted_formulas(st.deltas[x]):
            if isinstance(f, And) and f.left not in st.deltas[x] and f.right not in st.deltas[x]:
                out = []
                for part, tag in ((f.left, "left"), (f.right, "right")):
                    alt = st.clone()
                    alt.deltas[x].add(part)
                    alt.decisions += (f"{x}: falsify {tag} of {formula_to_text(f)}",)
                    out.append(alt)
                return out
        for f in sorted_formulas(st.gammas[x]):
            if isinstance(f, Or) and f.left not in st.gammas[x] and f.right not in st.gammas[x]:
                out = []
                for part, tag in ((f.left, "left"), (f.right, "right")):
                    alt = st.clone()
                    alt.gammas[x].add(part)
                    alt.decisions += (f"{x}: satisfy {tag} of {formula_to_text(f)}",)
                    out.append(alt)
                return out
    return None


def _witness_need(st: SaturationState) -> Optional[tuple[str, Formula]]:
    for x in st.order:
        cone = st.cone(x)
        for f in sorted_formulas(st.deltas[x]):
            if isinstance(f, Box) and not any(f.sub in st.deltas[y] for y in cone):
                return x, f.sub
    return None


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

RELATIONS = ("r1", "rplus", "rstar")


def close_relation(edges: set[tuple[str, str]], worlds: tuple[str, ...],
                   rel: str) -> frozenset[tuple[str, str]]:
    if rel not in RELATIONS:
        raise ValueError(f"unknown relation {rel!r}; choose from {RELATIONS}")
    out = set(edges)
    if rel in ("rplus", "rstar"):
        changed = True
        while changed:
            changed = False
            for a, b in list(out):
                for c, d in list(out):
                    if b == c and (a, d) not in out:
                        out.add((a, d))
                        changed = True
    if rel == "rstar":
        out |= {(w, w) for w in worlds}
    return frozenset(out)


class ExtractionError(RuntimeError):
    """The open saturation failed its own countermodel check: a bug in
    the reduction catalogue, not a property of the input."""


def extract_model(st: SaturationState, rel: str) -> tuple[KripkeModel, tuple[str, ...]]:
    """Read a model off an open saturated state and verify it refutes
    the spine; raises :class:`ExtractionError` if verification fails."""
    worlds = tuple(st.order)
    relation = close_relation(st.edges, worlds, rel)
    atoms = sorted({a.name for x in st.order for g in st.gammas[x] | st.deltas[x]
                    for a in _atoms_in(g)})
    val = {
        w: {a: (1 if Atom(a) in st.gammas[w] else 0) for a in atoms}
        for w in worlds
    }
    model = KripkeModel(KripkeFrame(worlds, relation), val)
    cache: dict = {}
    for w in worlds:
        for f in st.gammas[w]:
            if evaluate(model, w, f, cache) != 1:
                raise ExtractionError(
                    f"{formula_to_text(f)} should be true at {w}")
        for f in st.deltas[w]:
            if evaluate(model, w, f, cache) != 0:
                raise ExtractionError(
                    f"{formula_to_text(f)} should be false at {w}")
    return model, st.spine


def _atoms_in(f: Formula) -> list[Atom]:
    from .syntax import subformula_closure

    return [g for g in subformula_closure(f) if isinstance(g, Atom)]


# ---------------------------------------------------------------------------
# The decision entry point
# ---------------------------------------------------------------------------

@dataclass
class DecideResult:
    status: str                       # "valid" | "invalid" | "unknown"
    goal: Hypersequent
    system: str
    certificate: Optional[dict] = None
    model: Optional[KripkeModel] = None
    branch: Optional[tuple[str, ...]] = None
    states_explored: int = 0


def decide(goal: Hypersequent, system: str,
           limits: Optional[DecideLimits] = None) -> DecideResult:
    """Valid with a replayable certificate, or invalid with a verified
    countermodel (transitive for rk4cut, reflexive-transitive for
    rs4cut), or unknown on budget exhaustion."""
    outcome = saturate(goal, system, limits)
    if outcome.status == "closed":
        return DecideResult("valid", goal, system, certificate=outcome.certificate(),
                            states_explored=outcome.states_explored)
    if outcome.status == "open":
        rel = "rstar" if system == "rs4cut" else "rplus"
        model, branch = extract_model(outcome.open_state, rel)
        from .kripke import FrameClass, check_frame_class, countermodels_hypersequent

        cls = FrameClass.S4 if system == "rs4cut" else FrameClass.K4
        frame_ok = check_frame_class(model.frame, cls)
        if not frame_ok:
            raise ExtractionError(
                f"extracted frame violates {frame_ok.condition}: {frame_ok.witness}")
        if countermodels_hypersequent(model, goal) is None:
            raise ExtractionError(
                f"extracted model does not refute {hypersequent_to_text(goal)}")
        return DecideResult("invalid", goal, system, model=model, branch=branch,
                            states_explored=outcome.states_explored)
    return DecideResult("unknown", goal, system, states_explored=outcome.states_explored)
