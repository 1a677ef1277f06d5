"""Stable forcing, Kripke forcing, algebraic evaluation and countermodel search."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Mapping

from .filters import Filter, FilterLattice, enumerate_filters, is_filter
from .lattice import (
    CapExceeded,
    FinLattice,
    FinPoset,
    NotDistributive,
    bits,
    enumerate_distributive_lattices,
    opposite,
)
from .logic import And, Atom, Bot, Box, Dia, Formula, Imp, Or, Top, atoms, is_modal, to_text
from .modal import (
    LatticeAdjunction,
    StableBimodule,
    bimodule_from_adjunction,
    box_mask,
    diamond_mask,
    enumerate_stable_bimodules,
    is_stable_bimodule,
)


class MissingBimodule(ValueError):
    pass


class UnboundAtom(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"atom {name!r} has no value")

    def __str__(self):
        return self.args[0]


@dataclass(frozen=True)
class StableModel:
    frame: FinLattice
    valuation: Mapping[str, Filter]
    bimodule: StableBimodule | None = None

    def __post_init__(self):
        if not self.frame.distributive:
            raise NotDistributive(self.frame.dist_witness)
        for name, F in self.valuation.items():
            if F.carrier != self.frame:
                raise ValueError(f"valuation {name!r} lives on another lattice")
        if self.bimodule is not None:
            if self.bimodule.frame != self.frame:
                raise ValueError("bimodule lives on another lattice")
            if not is_stable_bimodule(self.frame, tuple(self.bimodule.rows)):
                raise ValueError("bimodule is not stable")

    @property
    def worlds(self) -> range:
        return range(self.frame.size)

    @property
    def supernova(self) -> int:
        return self.frame.top


class Forcing:
    """Memoized forcing relation of one model.

    Each subformula is evaluated once, clause by clause at every world, and
    its truth values are kept as a bit-mask over worlds.  Share one instance
    across many formulas on the same model.
    """

    def __init__(self, model: StableModel, strict: bool = True):
        self.m = model
        self.W = model.frame
        self.strict = strict
        self.memo: dict[Formula, int] = {}

    def value(self, name: str) -> int:
        F = self.m.valuation.get(name)
        if F is None:
            if self.strict:
                raise UnboundAtom(name)
            return 1 << self.W.top
        return F.members

    def rel(self) -> StableBimodule:
        if self.m.bimodule is None:
            raise MissingBimodule("modal formula needs a bimodule")
        return self.m.bimodule

    def holds(self, w: int, f: Formula) -> bool:
        return bool(self.forcing_set(f) >> w & 1)

    def forcing_set(self, f: Formula) -> int:
        hit = self.memo.get(f)
        if hit is None:
            hit = self.memo[f] = self._evaluate(f)
        return hit

    def _evaluate(self, f: Formula) -> int:
        W = self.W
        n = W.size
        if isinstance(f, Atom):
            return self.value(f.name)
        if isinstance(f, Top):
            return W.full
        if isinstance(f, Bot):
            # only the supernova forces falsity
            return 1 << W.top
        if isinstance(f, And):
            L, R = self.forcing_set(f.left), self.forcing_set(f.right)
            return sum(1 << w for w in range(n) if L >> w & 1 and R >> w & 1)
        if isinstance(f, Or):
            L, R = self.forcing_set(f.left), self.forcing_set(f.right)
            return sum(1 << w for w in range(n) if self._fan(w, L, R) is not None)
        if isinstance(f, Imp):
            L, R = self.forcing_set(f.left), self.forcing_set(f.right)
            # every v ⊒ w forcing the antecedent forces the consequent
            bad = L & ~R
            return sum(1 << w for w in range(n) if W.up[w] & bad == 0)
        if isinstance(f, Dia):
            S = self.forcing_set(f.sub)
            preds = self.rel().preds
            return sum(1 << w for w in range(n) if preds[w] & S)
        if isinstance(f, Box):
            S = self.forcing_set(f.sub)
            rows = self.rel().rows
            return sum(1 << w for w in range(n) if rows[w] & ~S == 0)
        raise TypeError(f"not a formula: {f!r}")

    def _fan(self, w: int, L: int, R: int) -> tuple[int, int] | None:
        below = self.W.down[w]
        meet = self.W.meet
        for v1 in bits(L):
            row = meet[v1]
            for v2 in bits(R):
                if below >> row[v2] & 1:
                    return v1, v2
        return None

    def fan_witness(self, w: int, f: Or) -> tuple[int, int] | None:
        """First ``(v1, v2)`` with ``v1 ∧ v2 ⊑ w``, ``v1`` forcing the left and ``v2`` the right disjunct."""
        return self._fan(w, self.forcing_set(f.left), self.forcing_set(f.right))


def force(M: StableModel, w: int, f: Formula, strict: bool = True) -> bool:
    if not 0 <= w < M.frame.size:
        raise IndexError(f"no world {w}")
    return Forcing(M, strict).holds(w, f)


def forcing_set(M: StableModel, f: Formula, strict: bool = True) -> int:
    return Forcing(M, strict).forcing_set(f)


def explain(M: StableModel, w: int, f: Formula, strict: bool = True) -> list[str]:
    """Clause-by-clause trace of ``force(M, w, f)``, one line per step."""
    ev = Forcing(M, strict)
    names = M.frame.names
    lines: list[str] = []

    def go(w: int, f: Formula, indent: int):
        pad = "  " * indent
        verdict = ev.holds(w, f)
        head = f"{pad}{names[w]} {'⊩' if verdict else '⊮'} {to_text(f)}"
        if isinstance(f, Atom):
            lines.append(f"{head}  [valuation]")
        elif isinstance(f, (Top, Bot)):
            lines.append(f"{head}  [{'supernova' if isinstance(f, Bot) and verdict else 'constant'}]")
        elif isinstance(f, And):
            lines.append(head)
            go(w, f.left, indent + 1)
            go(w, f.right, indent + 1)
        elif isinstance(f, Or):
            wit = ev.fan_witness(w, f)
            if wit is None:
                lines.append(f"{head}  [no fan-in witnesses]")
            else:
                v1, v2 = wit
                lines.append(f"{head}  [witnesses ({names[v1]},{names[v2]}): {names[v1]}∧{names[v2]}={names[M.frame.meet[v1][v2]]} ⊑ {names[w]}]")
                go(v1, f.left, indent + 1)
                go(v2, f.right, indent + 1)
        elif isinstance(f, Imp):
            bad = [v for v in bits(M.frame.up[w]) if ev.holds(v, f.left) and not ev.holds(v, f.right)]
            if bad:
                lines.append(f"{head}  [fails at {names[bad[0]]} ⊒ {names[w]}]")
                go(bad[0], f.left, indent + 1)
                go(bad[0], f.right, indent + 1)
            else:
                lines.append(f"{head}  [holds at every world above]")
        elif isinstance(f, Dia):
            wit = [v for v in bits(ev.rel().preds[w]) if ev.holds(v, f.sub)]
            if wit:
                lines.append(f"{head}  [witness {names[wit[0]]} R {names[w]}]")
                go(wit[0], f.sub, indent + 1)
            else:
                lines.append(f"{head}  [no R-predecessor forces the body]")
        elif isinstance(f, Box):
            bad = [v for v in bits(ev.rel().rows[w]) if not ev.holds(v, f.sub)]
            if bad:
                lines.append(f"{head}  [fails at {names[w]} R {names[bad[0]]}]")
                go(bad[0], f.sub, indent + 1)
            else:
                lines.append(f"{head}  [every R-successor forces the body]")

    go(w, f, 0)
    return lines


def eval_filter(M: StableModel, f: Formula, strict: bool = True) -> Filter:
    """Interpret ``f`` in the locale of filters of the frame."""
    FL = enumerate_filters(M.frame)
    return FL.filters[_eval_index(M, FL, f, strict, {})]


def _eval_index(M: StableModel, FL: FilterLattice, f: Formula, strict: bool, memo: dict) -> int:
    hit = memo.get(f)
    if hit is not None:
        return hit
    L = FL.lattice
    if isinstance(f, Atom):
        F = M.valuation.get(f.name)
        if F is None:
            if strict:
                raise UnboundAtom(f.name)
            out = L.bottom
        else:
            out = FL.of(F)
    elif isinstance(f, Top):
        out = L.top
    elif isinstance(f, Bot):
        out = L.bottom
    elif isinstance(f, (And, Or, Imp)):
        a = _eval_index(M, FL, f.left, strict, memo)
        b = _eval_index(M, FL, f.right, strict, memo)
        table = L.meet if isinstance(f, And) else L.join if isinstance(f, Or) else FL.imp
        out = table[a][b]
    elif isinstance(f, (Dia, Box)):
        if M.bimodule is None:
            raise MissingBimodule("modal formula needs a bimodule")
        a = _eval_index(M, FL, f.sub, strict, memo)
        op = diamond_mask if isinstance(f, Dia) else box_mask
        out = FL.of(op(M.frame, M.bimodule.rows, FL.mask(a)))
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def eval_filter_mask(M: StableModel, f: Formula, strict: bool = True, memo: dict | None = None) -> int:
    FL = enumerate_filters(M.frame)
    return FL.mask(_eval_index(M, FL, f, strict, {} if memo is None else memo))


@dataclass(frozen=True)
class HeytingAssignment:
    algebra: FinLattice
    values: Mapping[str, int]
    adjunction: LatticeAdjunction | None = None

    def __post_init__(self):
        if not self.algebra.distributive:
            raise NotDistributive(self.algebra.dist_witness)
        for name, x in self.values.items():
            if not 0 <= x < self.algebra.size:
                raise ValueError(f"value of {name!r} out of range")
        if self.adjunction is not None and self.adjunction.algebra != self.algebra:
            raise ValueError("adjunction lives on another algebra")


def heyting_eval(asg: HeytingAssignment, f: Formula, memo: dict | None = None) -> int:
    H = asg.algebra
    memo = {} if memo is None else memo

    def ev(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, Atom):
            if g.name not in asg.values:
                raise UnboundAtom(g.name)
            out = asg.values[g.name]
        elif isinstance(g, Top):
            out = H.top
        elif isinstance(g, Bot):
            out = H.bottom
        elif isinstance(g, And):
            out = H.meet[ev(g.left)][ev(g.right)]
        elif isinstance(g, Or):
            out = H.join[ev(g.left)][ev(g.right)]
        elif isinstance(g, Imp):
            out = H.implies[ev(g.left)][ev(g.right)]
        elif isinstance(g, (Dia, Box)):
            if asg.adjunction is None:
                raise MissingBimodule("modal formula needs an adjunction on the algebra")
            table = asg.adjunction.dia if isinstance(g, Dia) else asg.adjunction.box
            out = table[ev(g.sub)]
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return ev(f)


def build_upset_model(asg: HeytingAssignment) -> StableModel:
    """Stable model on ``opposite(H)`` with ``V(p) = {y : y ≤ ⟦p⟧}``.

    An adjunction on ``H`` becomes the bimodule relating ``x`` to ``y`` iff
    ``y ≤ dia(x)``.
    """
    H = asg.algebra
    frame = opposite(H)
    valuation = {p: Filter(frame, H.down[x]) for p, x in asg.values.items()}
    bimodule = bimodule_from_adjunction(asg.adjunction) if asg.adjunction is not None else None
    return StableModel(frame, valuation, bimodule)


@dataclass(frozen=True)
class KripkeModel:
    """Upper-set semantics on a poset, used for comparison only."""

    frame: FinPoset
    valuation: Mapping[str, int]
    relation: tuple[int, ...] | None = None

    def __post_init__(self):
        P = self.frame
        for name, S in self.valuation.items():
            if any(P.up[w] & ~S for w in bits(S)):
                raise ValueError(f"valuation {name!r} is not an upper set")
        if self.relation is not None:
            rows = self.relation
            for w in range(P.size):
                for v in bits(rows[w]):
                    for w2 in bits(P.down[w]):
                        if P.up[v] & ~rows[w2]:
                            raise ValueError("relation violates the bimodule law")


def kripke_from_stable(M: StableModel) -> KripkeModel:
    return KripkeModel(
        M.frame.poset,
        {p: F.members for p, F in M.valuation.items()},
        M.bimodule.rows if M.bimodule is not None else None,
    )


def kripke_set(K: KripkeModel, f: Formula, memo: dict | None = None) -> int:
    """Worlds satisfying ``f`` as a bit-mask; ``memo`` maps subformulas to masks."""
    P = K.frame
    memo = {} if memo is None else memo
    full = (1 << P.size) - 1

    def sat(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, Atom):
            if g.name not in K.valuation:
                raise UnboundAtom(g.name)
            out = K.valuation[g.name]
        elif isinstance(g, Top):
            out = full
        elif isinstance(g, Bot):
            out = 0
        elif isinstance(g, And):
            out = sat(g.left) & sat(g.right)
        elif isinstance(g, Or):
            out = sat(g.left) | sat(g.right)
        elif isinstance(g, Imp):
            bad = sat(g.left) & ~sat(g.right)
            out = sum(1 << w for w in range(P.size) if not P.up[w] & bad)
        elif isinstance(g, (Dia, Box)):
            if K.relation is None:
                raise MissingBimodule("modal formula needs a relation")
            rows = K.relation
            S = sat(g.sub)
            if isinstance(g, Dia):
                out = 0
                for v in bits(S):
                    out |= sum(1 << w for w in range(P.size) if rows[v] >> w & 1)
            else:
                out = sum(1 << w for w in range(P.size) if not rows[w] & ~S)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return sat(f)


def kripke_force(K: KripkeModel, w: int, f: Formula, memo: dict | None = None) -> bool:
    return bool(kripke_set(K, f, memo) >> w & 1)


def valuations(W: FinLattice, names) -> Iterator[dict[str, Filter]]:
    """Every assignment of ``names`` to filters of ``W``, filters in bit-set order."""
    FL = enumerate_filters(W)
    filters = sorted(FL.filters, key=lambda F: F.members)
    names = sorted(names)
    for choice in product(filters, repeat=len(names)):
        yield dict(zip(names, choice))


@dataclass
class Countermodel:
    model: StableModel
    world: int
    formula: Formula
    checked: int = field(default=0)


MODAL_SEARCH_MAX_SIZE = 8


def countermodel_search(
    f: Formula,
    max_base_size: int,
    vars_cap: int = 2,
    cap: int | None = None,
    modal_max_size: int = MODAL_SEARCH_MAX_SIZE,
) -> Countermodel | None:
    """First (model, world) in canonical order where ``f`` is not forced, or ``None``.

    Order: frames by base-poset size then canonical form; for modal formulas
    each stable bimodule in enumeration order; valuations in bit-set order;
    worlds ascending.  Modal formulas only visit frames with at most
    ``modal_max_size`` elements, since bimodules multiply quickly.
    """
    names = sorted(atoms(f))
    if len(names) > vars_cap:
        raise CapExceeded(f"formula has {len(names)} atoms, cap is {vars_cap}")
    modal = is_modal(f)
    checked = 0
    for W in enumerate_distributive_lattices(max_base_size, cap):
        if modal and W.size > modal_max_size:
            continue
        bimodules = enumerate_stable_bimodules(W) if modal else (None,)
        for B in bimodules:
            for val in valuations(W, names):
                M = StableModel(W, val, B)
                ev = Forcing(M)
                for w in range(W.size):
                    checked += 1
                    if not ev.holds(w, f):
                        return Countermodel(M, w, f, checked)
    return None


def forcing_set_is_filter(M: StableModel, f: Formula, ev: Forcing | None = None) -> bool:
    ev = ev or Forcing(M)
    return bool(is_filter(M.frame, ev.forcing_set(f)))
