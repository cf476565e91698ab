"""Object language: formulas, sequents and hypersequents.

The language has atoms ``p``, ``q``, ``p1``, ..., negation ``~``, the
necessity operator ``[]``, conjunction ``&`` and disjunction ``|``.
Sequent sides are *sets* of formulas, so inserting a formula that is
already present is a no-op.  That set behaviour is load bearing: it is
what makes external contraction derivable from Merge, and it is relied
on by several rule schemas.  Hypersequents are non-empty ordered
sequences of sequents; component order is significant.

All values here are immutable and hashable, and safe to share freely.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


class ParseError(ValueError):
    """Raised on malformed input; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        object.__setattr__(self, "name", sys.intern(self.name))


@dataclass(frozen=True)
class Neg:
    sub: "Formula"


@dataclass(frozen=True)
class Box:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Neg, Box, And, Or]


def formula_size(f: Formula) -> int:
    """Number of nodes in the formula tree."""
    if isinstance(f, Atom):
        return 1
    if isinstance(f, (Neg, Box)):
        return 1 + formula_size(f.sub)
    return 1 + formula_size(f.left) + formula_size(f.right)


def modal_depth(f: Formula) -> int:
    """Maximum nesting of the necessity operator."""
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Box):
        return 1 + modal_depth(f.sub)
    if isinstance(f, Neg):
        return modal_depth(f.sub)
    return max(modal_depth(f.left), modal_depth(f.right))


def subformula_closure(f: Formula) -> frozenset[Formula]:
    """Smallest set containing ``f`` and closed under immediate subformulas."""
    acc: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in acc:
            continue
        acc.add(g)
        if isinstance(g, (Neg, Box)):
            stack.append(g.sub)
        elif isinstance(g, (And, Or)):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(acc)


def atoms_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformula_closure(f) if isinstance(g, Atom))


def formula_to_text(f: Formula) -> str:
    """Render with minimal parentheses.

    Precedence: prefix operators bind tightest, then ``&``, then ``|``;
    the binary operators associate to the left, so right-nested
    occurrences are parenthesised explicitly.
    """
    return _render(f, 0)


def _prec(f: Formula) -> int:
    if isinstance(f, Or):
        return 1
    if isinstance(f, And):
        return 2
    return 3


def _render(f: Formula, parent_prec: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Neg):
        return "~" + _render(f.sub, 3)
    if isinstance(f, Box):
        return "[]" + _render(f.sub, 3)
    op = " & " if isinstance(f, And) else " | "
    mine = _prec(f)
    left = _render(f.left, mine - 1)   # left child: same level ok (left assoc)
    right = _render(f.right, mine)     # right child at same level needs parens
    text = left + op + right
    if mine <= parent_prec:
        return "(" + text + ")"
    return text


def sort_key(f: Formula) -> tuple[int, str]:
    """Canonical ordering key: by size, then by printed text."""
    return (formula_size(f), formula_to_text(f))


def sorted_formulas(fs: Iterable[Formula]) -> list[Formula]:
    return sorted(fs, key=sort_key)


def big_and(fs: Iterable[Formula]) -> Formula:
    """Right-nested conjunction over the canonical order; requires >= 1 formula."""
    ordered = sorted_formulas(fs)
    if not ordered:
        raise ValueError("empty conjunction has no rendering in this language")
    acc = ordered[-1]
    for g in reversed(ordered[:-1]):
        acc = And(g, acc)
    return acc


def big_or(fs: Iterable[Formula]) -> Formula:
    """Right-nested disjunction over the canonical order; requires >= 1 formula."""
    ordered = sorted_formulas(fs)
    if not ordered:
        raise ValueError("empty disjunction has no rendering in this language")
    acc = ordered[-1]
    for g in reversed(ordered[:-1]):
        acc = Or(g, acc)
    return acc


# ---------------------------------------------------------------------------
# Sequents and hypersequents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sequent:
    """An ordered pair of finite formula sets (antecedent, succedent)."""

    left: frozenset[Formula]
    right: frozenset[Formula]

    @staticmethod
    def make(left: Iterable[Formula] = (), right: Iterable[Formula] = ()) -> "Sequent":
        return Sequent(frozenset(left), frozenset(right))

    def is_empty(self) -> bool:
        return not self.left and not self.right

    def add_left(self, f: Formula) -> "Sequent":
        return Sequent(self.left | {f}, self.right)

    def add_right(self, f: Formula) -> "Sequent":
        return Sequent(self.left, self.right | {f})

    def remove_left(self, f: Formula) -> "Sequent":
        return Sequent(self.left - {f}, self.right)

    def remove_right(self, f: Formula) -> "Sequent":
        return Sequent(self.left, self.right - {f})

    def atoms(self) -> frozenset[str]:
        names: set[str] = set()
        for f in self.left | self.right:
            names |= atoms_of(f)
        return frozenset(names)


EMPTY_SEQUENT = Sequent(frozenset(), frozenset())


@dataclass(frozen=True)
class Hypersequent:
    """Non-empty ordered sequence of sequents."""

    components: tuple[Sequent, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("a hypersequent has at least one component")

    @staticmethod
    def make(components: Iterable[Sequent]) -> "Hypersequent":
        return Hypersequent(tuple(components))

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Sequent:
        return self.components[i]

    def __iter__(self) -> Iterator[Sequent]:
        return iter(self.components)

    def replace(self, i: int, s: Sequent) -> "Hypersequent":
        comps = list(self.components)
        comps[i] = s
        return Hypersequent(tuple(comps))

    def insert(self, i: int, s: Sequent) -> "Hypersequent":
        comps = list(self.components)
        comps.insert(i, s)
        return Hypersequent(tuple(comps))

    def delete(self, i: int) -> "Hypersequent":
        comps = list(self.components)
        del comps[i]
        return Hypersequent(tuple(comps))

    def append(self, s: Sequent) -> "Hypersequent":
        return Hypersequent(self.components + (s,))

    def reverse(self) -> "Hypersequent":
        return Hypersequent(tuple(reversed(self.components)))

    def swap(self, i: int) -> "Hypersequent":
        comps = list(self.components)
        comps[i], comps[i + 1] = comps[i + 1], comps[i]
        return Hypersequent(tuple(comps))

    def atoms(self) -> frozenset[str]:
        names: set[str] = set()
        for s in self.components:
            names |= s.atoms()
        return frozenset(names)

    def box_count(self) -> int:
        total = 0
        for s in self.components:
            for f in s.left | s.right:
                total += sum(1 for g in _walk(f) if isinstance(g, Box))
        return total


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (Neg, Box)):
            stack.append(g.sub)
        elif isinstance(g, (And, Or)):
            stack.append(g.left)
            stack.append(g.right)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_SYMBOLS = ("=>", "//", "[]", "~", "&", "|", "(", ")", ",")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []   # (kind, value, pos)
        self._scan()
        self.i = 0

    def _scan(self):
        text = self.text
        pos = 0
        while pos < len(text):
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            matched = False
            for sym in _SYMBOLS:
                if text.startswith(sym, pos):
                    self.items.append(("sym", sym, pos))
                    pos += len(sym)
                    matched = True
                    break
            if matched:
                continue
            if ch.isalpha() and ch.islower():
                end = pos + 1
                while end < len(text) and (text[end].isalnum() or text[end] == "_"):
                    end += 1
                self.items.append(("atom", text[pos:end], pos))
                pos = end
                continue
            raise ParseError(f"unexpected character {ch!r}", pos)
        self.items.append(("end", "", len(text)))

    def peek(self) -> tuple[str, str, int]:
        return self.items[self.i]

    def next(self) -> tuple[str, str, int]:
        item = self.items[self.i]
        self.i += 1
        return item

    def expect(self, value: str):
        kind, val, pos = self.next()
        if kind != "sym" or val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)


def parse_formula(text: str) -> Formula:
    """Parse a formula; raises :class:`ParseError` on malformed input."""
    toks = _Tokens(text)
    f = _parse_or(toks)
    kind, val, pos = toks.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", pos)
    return f


def _parse_or(toks: _Tokens) -> Formula:
    f = _parse_and(toks)
    while toks.peek()[:2] == ("sym", "|"):
        toks.next()
        f = Or(f, _parse_and(toks))
    return f


def _parse_and(toks: _Tokens) -> Formula:
    f = _parse_unary(toks)
    while toks.peek()[:2] == ("sym", "&"):
        toks.next()
        f = And(f, _parse_unary(toks))
    return f


def _parse_unary(toks: _Tokens) -> Formula:
    kind, val, pos = toks.next()
    if kind == "sym" and val == "~":
        return Neg(_parse_unary(toks))
    if kind == "sym" and val == "[]":
        return Box(_parse_unary(toks))
    if kind == "sym" and val == "(":
        f = _parse_or(toks)
        toks.expect(")")
        return f
    if kind == "atom":
        return Atom(val)
    raise ParseError(f"expected a formula, found {val or 'end of input'!r}", pos)


def _parse_formula_list(toks: _Tokens) -> list[Formula]:
    out = [_parse_or(toks)]
    while toks.peek()[:2] == ("sym", ","):
        toks.next()
        out.append(_parse_or(toks))
    return out


def parse_sequent(text: str) -> Sequent:
    """Parse ``Gamma => Delta``; either side may be empty."""
    toks = _Tokens(text)
    s = _parse_sequent(toks)
    kind, val, pos = toks.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", pos)
    return s


def _parse_sequent(toks: _Tokens) -> Sequent:
    left: list[Formula] = []
    if toks.peek()[:2] != ("sym", "=>"):
        left = _parse_formula_list(toks)
    toks.expect("=>")
    right: list[Formula] = []
    if toks.peek()[0] != "end" and toks.peek()[:2] != ("sym", "//"):
        right = _parse_formula_list(toks)
    return Sequent.make(left, right)


def parse_hypersequent(text: str) -> Hypersequent:
    """Parse ``S1 // S2 // ... // Sn``; rejects empty input."""
    toks = _Tokens(text)
    if toks.peek()[0] == "end":
        raise ParseError("empty hypersequent", 0)
    comps = [_parse_sequent(toks)]
    while toks.peek()[:2] == ("sym", "//"):
        toks.next()
        comps.append(_parse_sequent(toks))
    kind, val, pos = toks.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", pos)
    return Hypersequent.make(comps)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def sequent_to_text(s: Sequent) -> str:
    left = ", ".join(formula_to_text(f) for f in sorted_formulas(s.left))
    right = ", ".join(formula_to_text(f) for f in sorted_formulas(s.right))
    if left and right:
        return f"{left} => {right}"
    if left:
        return f"{left} =>"
    if right:
        return f"=> {right}"
    return "=>"


def hypersequent_to_text(h: Hypersequent) -> str:
    return " // ".join(sequent_to_text(s) for s in h.components)


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------

def formula_to_data(f: Formula) -> dict:
    if isinstance(f, Atom):
        return {"atom": f.name}
    if isinstance(f, Neg):
        return {"neg": formula_to_data(f.sub)}
    if isinstance(f, Box):
        return {"box": formula_to_data(f.sub)}
    if isinstance(f, And):
        return {"and": [formula_to_data(f.left), formula_to_data(f.right)]}
    return {"or": [formula_to_data(f.left), formula_to_data(f.right)]}


def formula_from_data(data: dict) -> Formula:
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError(f"not a formula record: {data!r}")
    tag, body = next(iter(data.items()))
    if tag == "atom":
        return Atom(body)
    if tag == "neg":
        return Neg(formula_from_data(body))
    if tag == "box":
        return Box(formula_from_data(body))
    if tag == "and":
        return And(formula_from_data(body[0]), formula_from_data(body[1]))
    if tag == "or":
        return Or(formula_from_data(body[0]), formula_from_data(body[1]))
    raise ValueError(f"unknown formula tag {tag!r}")


def sequent_to_data(s: Sequent) -> dict:
    return {
        "left": [formula_to_data(f) for f in sorted_formulas(s.left)],
        "right": [formula_to_data(f) for f in sorted_formulas(s.right)],
    }


def sequent_from_data(data: dict) -> Sequent:
    return Sequent.make(
        (formula_from_data(d) for d in data["left"]),
        (formula_from_data(d) for d in data["right"]),
    )


def hypersequent_to_data(h: Hypersequent) -> dict:
    return {"components": [sequent_to_data(s) for s in h.components]}


def hypersequent_from_data(data: dict) -> Hypersequent:
    return Hypersequent.make(sequent_from_data(d) for d in data["components"])


def canonical_json(data: object) -> str:
    """Bit-exact canonical encoding: no whitespace, stable ordering."""
    return json.dumps(data, separators=(",", ":"), ensure_ascii=False)
