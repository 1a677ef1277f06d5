"""Formulas of intuitionistic modal logic: AST, parser, printer.

Concrete syntax, loosest to tightest::

    a -> b        right associative
    a | b         left associative
    a & b         left associative
    dia a, <> a, box a, [] a, ~a      prefix

``~a`` is sugar for ``a -> bot``.  Unicode ⊤ ⊥ ∧ ∨ → ¬ ♦ ◇ □ are accepted as
aliases.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Dia:
    sub: "Formula"


@dataclass(frozen=True)
class Box:
    sub: "Formula"


Formula = Union[Atom, Top, Bot, And, Or, Imp, Dia, Box]


def _cached_hash(self) -> int:
    # formulas are hashed constantly as memo keys; the tree never changes
    d = self.__dict__
    h = d.get("_hash")
    if h is None:
        h = d["_hash"] = hash((type(self).__name__, *(getattr(self, k) for k in self.__dataclass_fields__)))
    return h


for _cls in (Atom, Top, Bot, And, Or, Imp, Dia, Box):
    _cls.__hash__ = _cached_hash

KEYWORDS = {"top", "bot", "dia", "box"}
IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")


def Not(f: Formula) -> Imp:
    return Imp(f, Bot())


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str):
        self.pos = pos
        self.text = text
        where = "end of input" if pos >= len(text) else f"position {pos}"
        super().__init__(f"{message} at {where}")


_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[a-zA-Z][a-zA-Z0-9_]*)|(?P<sym>->|<>|\[\]|[&|~()⊤⊥∧∨→¬♦◇□◆]))"
)
_ALIASES = {
    "⊤": "top",
    "⊥": "bot",
    "∧": "&",
    "∨": "|",
    "→": "->",
    "¬": "~",
    "♦": "dia",
    "◆": "dia",
    "◇": "dia",
    "<>": "dia",
    "□": "box",
    "[]": "box",
}


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """``(kind, value, position)`` triples; kind is ``ident``, ``kw`` or ``sym``."""
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start("ident") if m.group("ident") else m.start("sym")
        raw = m.group("ident") or m.group("sym")
        val = _ALIASES.get(raw, raw)
        if m.group("ident") and val not in KEYWORDS:
            out.append(("ident", val, start))
        elif val in KEYWORDS:
            out.append(("kw", val, start))
        else:
            out.append(("sym", val, start))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, val: str):
        if self.peek() != val:
            got = "end of input" if self.peek() is None else repr(self.peek())
            raise ParseError(f"expected {val!r}, got {got}", self.pos(), self.text)
        self.take()

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.i >= len(self.toks):
            raise ParseError("expected a formula", len(self.text), self.text)
        kind, val, pos = self.take()
        if val == "dia":
            return Dia(self.unary())
        if val == "box":
            return Box(self.unary())
        if val == "~":
            return Not(self.unary())
        if val == "top":
            return Top()
        if val == "bot":
            return Bot()
        if kind == "ident":
            return Atom(val)
        if val == "(":
            f = self.formula()
            self.expect(")")
            return f
        raise ParseError(f"unexpected {val!r}", pos, self.text)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.i != len(p.toks):
        raise ParseError(f"unexpected {p.peek()!r}", p.pos(), text)
    return f


_PREC = {Imp: 1, Or: 2, And: 3}


def _prec(f: Formula) -> int:
    if isinstance(f, Imp) and isinstance(f.right, Bot):
        return 4
    return _PREC.get(type(f), 4)


def to_text(f: Formula) -> str:
    """Render with the fewest parentheses that re-parse to the same tree."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Imp) and isinstance(f.right, Bot):
        return "~" + _wrap(f.left, 4)
    if isinstance(f, (Dia, Box)):
        kw = "dia" if isinstance(f, Dia) else "box"
        return f"{kw} {_wrap(f.sub, 4)}"
    p = _PREC[type(f)]
    op = {Imp: "->", Or: "|", And: "&"}[type(f)]
    if isinstance(f, Imp):
        left, right = _wrap(f.left, p + 1), _wrap(f.right, p)
    else:
        left, right = _wrap(f.left, p), _wrap(f.right, p + 1)
    return f"{left} {op} {right}"


def _wrap(f: Formula, min_prec: int) -> str:
    s = to_text(f)
    return s if _prec(f) >= min_prec else f"({s})"


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order walk: children before parents."""
    if isinstance(f, (And, Or, Imp)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Dia, Box)):
        yield from subformulas(f.sub)
    yield f


def depth(f: Formula) -> int:
    if isinstance(f, (And, Or, Imp)):
        return 1 + max(depth(f.left), depth(f.right))
    if isinstance(f, (Dia, Box)):
        return 1 + depth(f.sub)
    return 0


def is_modal(f: Formula) -> bool:
    return any(isinstance(g, (Dia, Box)) for g in subformulas(f))


def in_fragment(f: Formula) -> bool:
    """Only atoms, top, conjunction and implication."""
    return all(isinstance(g, (Atom, Top, And, Imp)) for g in subformulas(f))


def random_formula(
    rng: random.Random,
    max_depth: int,
    names=("p", "q"),
    modal: bool = False,
    fragment: bool = False,
) -> Formula:
    """Random tree of depth at most ``max_depth``.

    ``fragment`` restricts to atoms, top, & and ->; ``modal`` adds dia/box.
    """
    leaves: list = [Atom(n) for n in names] + [Top()]
    if not fragment:
        leaves.append(Bot())
    binary: list = [And, Imp] if fragment else [And, Or, Imp]
    unary: list = [Dia, Box] if modal and not fragment else []
    if max_depth == 0 or rng.random() < 0.25:
        return rng.choice(leaves)
    k = rng.randrange(len(binary) + len(unary))
    if k < len(binary):
        return binary[k](
            random_formula(rng, max_depth - 1, names, modal, fragment),
            random_formula(rng, max_depth - 1, names, modal, fragment),
        )
    return unary[k - len(binary)](random_formula(rng, max_depth - 1, names, modal, fragment))


def random_formulas(seed: int, count: int, max_depth: int = 4, **kw) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, max_depth, **kw) for _ in range(count)]


CURATED_THEOREMS = tuple(
    parse(s)
    for s in (
        "p -> p",
        "p -> q -> p",
        "(p -> p -> q) -> p -> q",
        "p & (p -> q) -> q",
        "p & q -> q & p",
        "p | q -> q | p",
        "bot -> p",
        "p -> ~~p",
        "~~(p | ~p)",
        "(p -> q) -> ~q -> ~p",
        "p & (q | ~q) -> p & q | p & ~q",
        "~p | ~q -> ~(p & q)",
    )
)

MODAL_AXIOMS = (parse("p -> box dia p"), parse("dia box p -> p"))
