"""Stable bimodules and the adjoint modalities they induce on filters.

A relation is stored as a tuple of row masks: ``rows[w]`` has bit ``v`` set
iff ``w R v``.  Bimodules built from a Heyting algebra live on its opposite,
so callers only ever see one orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .filters import (
    CarrierMismatch,
    Filter,
    NotJoinPreserving,
    enumerate_filters,
    join_mask,
    join_preserving_maps,
    stable_maps,
)
from .lattice import FinLattice, NotDistributive, bits, opposite


class BimoduleError(ValueError):
    def __init__(self, condition: str, witness: tuple, message: str = ""):
        self.condition = condition
        self.witness = witness
        super().__init__(message or f"condition {condition} fails at {witness}")


class InvalidAdjunction(ValueError):
    pass


CONDITIONS = ("bimodule", "i", "ii", "iii", "iv")


def rows_from_table(rel: Sequence[Sequence[bool]]) -> tuple[int, ...]:
    return tuple(sum(1 << v for v, on in enumerate(row) if on) for row in rel)


def table_from_rows(rows: Sequence[int], n: int) -> tuple[tuple[bool, ...], ...]:
    return tuple(tuple(bool(r >> v & 1) for v in range(n)) for r in rows)


def stability_violations(W: FinLattice, rows: Sequence[int]) -> dict[str, tuple]:
    """First witness for each failing condition; empty dict when ``rows`` is a stable bimodule."""
    n = W.size
    if len(rows) != n or any(r >> n for r in rows):
        raise ValueError("relation must be sized to the frame")
    out: dict[str, tuple] = {}
    # bimodule law: w' ⊑ w R v ⊑ v'  =>  w' R v'
    for w in range(n):
        for v in bits(rows[w]):
            for w2 in bits(W.down[w]):
                missing = W.up[v] & ~rows[w2]
                if missing:
                    out.setdefault("bimodule", (w2, w, v, bits(missing)[0]))
                    break
            if "bimodule" in out:
                break
        if "bimodule" in out:
            break
    for w in range(n):
        r = rows[w]
        for v1 in bits(r):
            for v2 in bits(r):
                if not r >> W.meet[v1][v2] & 1:
                    out.setdefault("i", (w, v1, v2))
                    break
            if "i" in out:
                break
        if "i" in out:
            break
    for w in range(n):
        if not rows[w] >> W.top & 1:
            out["ii"] = (w,)
            break
    # (iii): Λ(w1∧w2) must lie in the upward closure of {v1∧v2 : w1 R v1, w2 R v2}
    for w1 in range(n):
        for w2 in range(n):
            fan = join_mask(W, rows[w1], rows[w2])
            bad = rows[W.meet[w1][w2]] & ~fan
            if bad:
                out["iii"] = (w1, w2, bits(bad)[0])
                break
        if "iii" in out:
            break
    if rows[W.top] != 1 << W.top:
        extra = rows[W.top] & ~(1 << W.top)
        out["iv"] = (W.top, bits(extra)[0] if extra else W.top)
    return out


@lru_cache(maxsize=1 << 14)
def is_stable_bimodule(W: FinLattice, rows: tuple[int, ...]) -> bool:
    return not stability_violations(W, rows)


@dataclass(frozen=True)
class StableBimodule:
    frame: FinLattice
    rows: tuple[int, ...]
    preds: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.frame.size
        preds = tuple(sum(1 << w for w in range(n) if self.rows[w] >> v & 1) for v in range(n))
        object.__setattr__(self, "preds", preds)

    def related(self, w: int, v: int) -> bool:
        return bool(self.rows[w] >> v & 1)

    @property
    def table(self) -> tuple[tuple[bool, ...], ...]:
        return table_from_rows(self.rows, self.frame.size)

    def pairs(self) -> list[tuple[int, int]]:
        return [(w, v) for w in range(self.frame.size) for v in bits(self.rows[w])]


def check_stable_bimodule(frame: FinLattice, rel) -> StableBimodule:
    """Validate ``rel`` (boolean table or row masks) as a stable bimodule on ``frame``.

    Raises :class:`BimoduleError` for the first failing condition in the
    order bimodule law, (i), (ii), (iii), (iv).  Also confirms that whenever
    the bimodule law and (iv) hold, (ii) holds too.
    """
    if not frame.distributive:
        raise NotDistributive(frame.dist_witness)
    rows = tuple(rel) if rel and isinstance(rel[0], int) else rows_from_table(rel)
    if len(rows) != frame.size:
        raise ValueError("relation must be sized to the frame")
    bad = stability_violations(frame, rows)
    if "bimodule" not in bad and "iv" not in bad and "ii" in bad:
        raise AssertionError("(ii) failed although the bimodule law and (iv) hold")
    for cond in CONDITIONS:
        if cond in bad:
            raise BimoduleError(cond, bad[cond])
    return StableBimodule(frame, rows)


def identity_bimodule(W: FinLattice) -> StableBimodule:
    return check_stable_bimodule(W, W.up)


def diamond_mask(W: FinLattice, rows: Sequence[int], F: int) -> int:
    """``{w : ∃v. v R w and v ∈ F}``."""
    out = 0
    for v in bits(F):
        out |= rows[v]
    return out


def box_mask(W: FinLattice, rows: Sequence[int], F: int) -> int:
    """``{w : ∀v. w R v implies v ∈ F}``."""
    return sum(1 << w for w in range(W.size) if rows[w] & ~F == 0)


def _on_frame(B: StableBimodule, F: Filter):
    if F.carrier is not B.frame and F.carrier != B.frame:
        raise CarrierMismatch("filter does not live on the bimodule's frame")


def diamond_R(B: StableBimodule, F: Filter) -> Filter:
    _on_frame(B, F)
    return Filter(B.frame, diamond_mask(B.frame, B.rows, F.members))


def box_R(B: StableBimodule, F: Filter) -> Filter:
    _on_frame(B, F)
    return Filter(B.frame, box_mask(B.frame, B.rows, F.members))


@dataclass
class LawReport:
    ok: bool
    checks: int = 0
    failure: str = ""
    witness: tuple = ()


def check_adjunction_on_filters(frame: FinLattice, rows: Sequence[int]) -> LawReport:
    """Adjunction and preservation laws of the induced operators on Filt(frame).

    Takes raw rows so that corrupted relations can be examined; images that
    are not filters are reported as failures.
    """
    FL = enumerate_filters(frame)
    masks = [FL.mask(i) for i in range(FL.size)]
    dia = [diamond_mask(frame, rows, m) for m in masks]
    box = [box_mask(frame, rows, m) for m in masks]
    checks = 0
    for i, m in enumerate(masks):
        checks += 2
        if dia[i] not in FL.index:
            return LawReport(False, checks, "diamond image is not a filter", (m,))
        if box[i] not in FL.index:
            return LawReport(False, checks, "box image is not a filter", (m,))
    for i, F in enumerate(masks):
        for j, G in enumerate(masks):
            checks += 1
            left = dia[i] & ~G == 0
            right = F & ~box[j] == 0
            if left != right:
                return LawReport(False, checks, "diamond is not left adjoint to box", (F, G))
    L = FL.lattice
    bottom, top = masks[L.bottom], masks[L.top]
    checks += 2
    if dia[L.bottom] != bottom:
        return LawReport(False, checks, "diamond does not preserve the bottom filter", (bottom,))
    if box[L.top] != top:
        return LawReport(False, checks, "box does not preserve the top filter", (top,))
    for i in range(FL.size):
        for j in range(FL.size):
            checks += 2
            if dia[L.join[i][j]] != join_mask(frame, dia[i], dia[j]):
                return LawReport(False, checks, "diamond does not preserve joins", (masks[i], masks[j]))
            if box[L.meet[i][j]] != box[i] & box[j]:
                return LawReport(False, checks, "box does not preserve meets", (masks[i], masks[j]))
    return LawReport(True, checks)


def roundtrip_check(B: StableBimodule) -> LawReport:
    """``v R w`` iff ``w ∈ diamond_R(↑v)``, for every pair."""
    W = B.frame
    checks = 0
    for v in range(W.size):
        image = diamond_mask(W, B.rows, W.up[v])
        checks += 1
        if image != B.rows[v]:
            w = bits(image ^ B.rows[v])[0]
            return LawReport(False, checks, "relation not recovered from diamond", (v, w))
    return LawReport(True, checks)


@dataclass(frozen=True)
class LatticeAdjunction:
    algebra: FinLattice
    dia: tuple[int, ...]
    box: tuple[int, ...]

    def __post_init__(self):
        problem = adjunction_problem(self.algebra, self.dia, self.box)
        if problem:
            raise InvalidAdjunction(problem)


def adjunction_problem(H: FinLattice, dia: Sequence[int], box: Sequence[int]) -> str:
    n = H.size
    if len(dia) != n or len(box) != n:
        return "tables must have one entry per element"
    for x in range(n):
        for y in range(n):
            if H.leq(dia[x], y) != H.leq(x, box[y]):
                return f"dia({H.names[x]}) ⊑ {H.names[y]} disagrees with {H.names[x]} ⊑ box({H.names[y]})"
    if dia[H.bottom] != H.bottom:
        return "dia does not preserve bottom"
    if box[H.top] != H.top:
        return "box does not preserve top"
    for x in range(n):
        for y in range(n):
            if dia[H.join[x][y]] != H.join[dia[x]][dia[y]]:
                return f"dia does not preserve the join of {H.names[x]}, {H.names[y]}"
            if box[H.meet[x][y]] != H.meet[box[x]][box[y]]:
                return f"box does not preserve the meet of {H.names[x]}, {H.names[y]}"
    return ""


def right_adjoint_of(H: FinLattice, dia: Sequence[int]) -> tuple[int, ...]:
    """``box(y)`` = join of ``{x : dia(x) ⊑ y}``; refuses maps that do not preserve joins."""
    if dia[H.bottom] != H.bottom:
        raise NotJoinPreserving((H.bottom,))
    for x in range(H.size):
        for y in range(x + 1, H.size):
            if dia[H.join[x][y]] != H.join[dia[x]][dia[y]]:
                raise NotJoinPreserving((x, y))
    return tuple(
        H.join_all(x for x in range(H.size) if H.leq(dia[x], y)) for y in range(H.size)
    )


def adjunction_from_dia(H: FinLattice, dia: Sequence[int]) -> LatticeAdjunction:
    return LatticeAdjunction(H, tuple(dia), right_adjoint_of(H, dia))


def identity_adjunction(H: FinLattice) -> LatticeAdjunction:
    ident = tuple(range(H.size))
    return LatticeAdjunction(H, ident, ident)


def bimodule_from_adjunction(A: LatticeAdjunction) -> StableBimodule:
    """Bimodule on ``opposite(H)`` relating ``x`` to ``y`` iff ``y ≤ dia(x)`` in ``H``."""
    H = A.algebra
    if not H.distributive:
        raise NotDistributive(H.dist_witness)
    frame = opposite(H)
    rows = tuple(H.down[A.dia[x]] for x in range(H.size))
    return check_stable_bimodule(frame, rows)


def fan_witness(A: LatticeAdjunction, x1: int, x2: int, y: int) -> tuple[int, int]:
    """Witnesses for condition (iii) of the bimodule built from ``A``.

    Given ``y ≤ dia(x1) ∨ dia(x2)`` in ``H``, returns ``(y ∧ dia x1, y ∧ dia x2)``.
    """
    H = A.algebra
    return H.meet[y][A.dia[x1]], H.meet[y][A.dia[x2]]


@dataclass
class EmbeddingReport:
    ok: bool
    checks: int
    failure: str = ""
    witness: tuple = ()


def modal_embedding_check(A: LatticeAdjunction) -> EmbeddingReport:
    """Both squares of the principal-ideal embedding commute with the modalities.

    With ``B = bimodule_from_adjunction(A)`` on ``opposite(H)``, checks
    ``diamond_R(↓z) = ↓dia(z)`` and ``box_R(↓z) = ↓box(z)`` for every ``z``,
    where ``↓z`` is the principal filter of ``z`` in the opposite order.
    """
    H = A.algebra
    B = bimodule_from_adjunction(A)
    W = B.frame
    checks = 0
    for z in range(H.size):
        pz = W.up[z]
        checks += 2
        if diamond_mask(W, B.rows, pz) != W.up[A.dia[z]]:
            return EmbeddingReport(False, checks, "diamond square does not commute", (z,))
        if box_mask(W, B.rows, pz) != W.up[A.box[z]]:
            return EmbeddingReport(False, checks, "box square does not commute", (z,))
    return EmbeddingReport(True, checks)


def bimodule_relations(W: FinLattice) -> list[tuple[int, ...]]:
    """Every relation satisfying the bimodule law, as row masks.

    These are the up-sets of ``opposite(W) × W``.  Each undecided pair is
    branched on; excluding ``(w, v)`` excludes everything above ``w`` paired
    with everything below ``v``, including it includes the dual cone.
    """
    n = W.size
    pairs = [(w, v) for w in range(n) for v in range(n)]
    decided: list[list[bool | None]] = [[None] * n for _ in range(n)]
    out = []

    def settle(cone, value) -> list | None:
        if any(decided[a][b] is (not value) for a, b in cone):
            return None
        changed = [(a, b) for a, b in cone if decided[a][b] is None]
        for a, b in changed:
            decided[a][b] = value
        return changed

    def go(k: int):
        while k < len(pairs) and decided[pairs[k][0]][pairs[k][1]] is not None:
            k += 1
        if k == len(pairs):
            out.append(tuple(sum(1 << v for v in range(n) if decided[w][v]) for w in range(n)))
            return
        w, v = pairs[k]
        for value, cone in (
            (False, [(a, b) for a in bits(W.up[w]) for b in bits(W.down[v])]),
            (True, [(a, b) for a in bits(W.down[w]) for b in bits(W.up[v])]),
        ):
            changed = settle(cone, value)
            if changed is not None:
                go(k + 1)
                for a, b in changed:
                    decided[a][b] = None

    go(0)
    return out


def stable_bimodules_by_filtering(W: FinLattice) -> tuple[StableBimodule, ...]:
    """Stable bimodules found by testing every bimodule-law relation (slow; small frames)."""
    found = sorted(rows for rows in bimodule_relations(W) if not stability_violations(W, rows))
    return tuple(StableBimodule(W, rows) for rows in found)


@lru_cache(maxsize=64)
def enumerate_stable_bimodules(W: FinLattice) -> tuple[StableBimodule, ...]:
    """Every stable bimodule on ``W``, sorted by row masks.

    Each row of a stable bimodule is a filter, hence ``↑g(w)`` for some
    ``g``, and the stability conditions say exactly that ``g`` preserves
    meets and top.  So the bimodules are generated from stable self-maps.
    """
    found = sorted(tuple(W.up[x] for x in g.table) for g in stable_maps(W, W))
    return tuple(StableBimodule(W, rows) for rows in found)


def all_relations(n: int):
    """Every n×n relation as row masks (brute-force oracle)."""
    from itertools import product

    return product(range(1 << n), repeat=n)


def join_preserving_endomaps(H: FinLattice):
    for f in join_preserving_maps(H, H):
        yield f.table
