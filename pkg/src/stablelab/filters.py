"""Filters of a finite distributive lattice and the locale they form.

Also: Scott-continuous extension along the principal-ideal embedding,
stable maps with their filter preimages, and the finite checks of the
duality between stable maps and meet-preserving maps of filter locales.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

from .lattice import (
    FinLattice,
    FinPoset,
    MonotoneMap,
    NotDistributive,
    bits,
    complete_lattice,
    find_isomorphism,
    opposite,
)


class CarrierMismatch(ValueError):
    pass


class NotJoinPreserving(ValueError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"map does not preserve joins at {witness}")


class NotStable(ValueError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"map is not stable at {witness}")


def popcount(m: int) -> int:
    return bin(m).count("1")


@dataclass(frozen=True)
class FilterCheck:
    ok: bool
    clause: str | None = None
    witness: tuple[int, ...] = ()
    message: str = ""

    def __bool__(self):
        return self.ok


def _check_definition(W: FinLattice, S: int) -> FilterCheck:
    # non-empty, upper, and filtered (a common lower bound inside S)
    if S == 0:
        return FilterCheck(False, "non-empty", (), "set is empty")
    up, down = W.up, W.down
    members = bits(S)
    for w in members:
        outside = up[w] & ~S
        if outside:
            return FilterCheck(False, "upper", (w, bits(outside)[0]))
    for i, w in enumerate(members):
        lower = S & down[w]
        for v in members[i + 1:]:
            if lower & down[v] == 0:
                return FilterCheck(False, "filtered", (w, v))
    return FilterCheck(True)


def _check_semilattice(W: FinLattice, S: int) -> FilterCheck:
    names = W.names
    if S == 0:
        return FilterCheck(False, "non-empty", (), "set is empty")
    if not S >> W.top & 1:
        return FilterCheck(False, "top", (W.top,), f"missing top element {names[W.top]}")
    for w in bits(S):
        outside = W.up[w] & ~S
        if outside:
            v = bits(outside)[0]
            return FilterCheck(False, "upper", (w, v), f"missing {names[v]} above {names[w]}")
    members = bits(S)
    for i, w in enumerate(members):
        row = W.meet[w]
        for v in members[i + 1:]:
            m = row[v]
            if not S >> m & 1:
                return FilterCheck(
                    False, "meet-closed", (w, v), f"missing {names[w]}∧{names[v]}"
                )
    return FilterCheck(True)


def is_filter(W: FinLattice, S: int) -> FilterCheck:
    """Check that the bit-set ``S`` is a filter of ``W``.

    Both the definition (non-empty, upper, filtered) and the meet-semilattice
    form (upper, contains top, closed under binary meets) are evaluated; the
    diagnostics come from the latter.
    """
    if S & ~W.full:
        raise ValueError("set is not a subset of the carrier")
    direct = _check_definition(W, S)
    semi = _check_semilattice(W, S)
    if direct.ok != semi.ok:
        raise AssertionError(f"filter characterizations disagree on {S:#b}")
    return semi


@dataclass(frozen=True)
class Filter:
    carrier: FinLattice
    members: int

    def __post_init__(self):
        check = is_filter(self.carrier, self.members)
        if not check:
            raise ValueError(f"not a filter: {check.message or check.clause}")

    def __contains__(self, w: int) -> bool:
        return bool(self.members >> w & 1)

    def __le__(self, other: "Filter") -> bool:
        _same_carrier(self, other)
        return self.members & ~other.members == 0

    def elements(self) -> list[int]:
        return list(bits(self.members))

    def generator(self) -> int:
        """The least member; every finite filter is the principal filter on it."""
        return self.carrier.meet_all(bits(self.members))

    def label(self) -> str:
        return "{" + ",".join(self.carrier.names[i] for i in bits(self.members)) + "}"

    def __repr__(self):
        return f"Filter({self.label()})"


def _same_carrier(F1: Filter, F2: Filter) -> FinLattice:
    if F1.carrier is not F2.carrier and F1.carrier != F2.carrier:
        raise CarrierMismatch("filters live on different lattices")
    return F1.carrier


def principal_filter(W: FinLattice, w: int) -> Filter:
    return Filter(W, W.up[w])


def upward_closure(W: FinLattice, S: int) -> int:
    out = 0
    for w in bits(S):
        out |= W.up[w]
    return out


def join_mask(W: FinLattice, A: int, B: int) -> int:
    """Upward closure of ``{a∧b : a ∈ A, b ∈ B}``."""
    meets = 0
    for a in bits(A):
        row = W.meet[a]
        for b in bits(B):
            meets |= 1 << row[b]
    return upward_closure(W, meets)


def heyting_mask(W: FinLattice, A: int, B: int) -> int:
    """``{w : every v ⊒ w in A is in B}``."""
    bad = A & ~B
    return sum(1 << w for w in range(W.size) if W.up[w] & bad == 0)


def filter_meet(F1: Filter, F2: Filter) -> Filter:
    W = _same_carrier(F1, F2)
    return Filter(W, F1.members & F2.members)


def filter_join(F1: Filter, F2: Filter) -> Filter:
    W = _same_carrier(F1, F2)
    return Filter(W, join_mask(W, F1.members, F2.members))


def filter_heyting(F1: Filter, F2: Filter) -> Filter:
    W = _same_carrier(F1, F2)
    if not W.distributive:
        raise NotDistributive(W.dist_witness)
    return Filter(W, heyting_mask(W, F1.members, F2.members))


def filter_sup(W: FinLattice, masks) -> int:
    """Join of any family of filters: upward closure of finite meets of members."""
    acc = 1 << W.top
    for m in masks:
        acc = join_mask(W, acc, m)
    return acc


@dataclass(frozen=True, eq=False)
class FilterLattice:
    """All filters of ``carrier``, ordered by inclusion.

    ``filters`` is sorted by (size, bit pattern); ``lattice`` is the same set
    as a :class:`FinLattice` whose index ``i`` is ``filters[i]``.
    """

    carrier: FinLattice
    filters: tuple[Filter, ...]
    lattice: FinLattice
    index: dict
    imp: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.filters)

    @property
    def bottom(self) -> int:
        return self.lattice.bottom

    @property
    def top(self) -> int:
        return self.lattice.top

    def mask(self, i: int) -> int:
        return self.filters[i].members

    def of(self, F: Filter | int) -> int:
        return self.index[F.members if isinstance(F, Filter) else F]

    def principal(self, w: int) -> int:
        return self.index[self.carrier.up[w]]


def scan_filters(W: FinLattice) -> list[int]:
    """Every filter of ``W``, found by testing all subsets."""
    return [S for S in range(1, 1 << W.size) if is_filter(W, S)]


@lru_cache(maxsize=256)
def enumerate_filters(W: FinLattice) -> FilterLattice:
    """Build the locale of filters of ``W``.

    Filters are found twice, by subset scan and as principal filters; the two
    lists must coincide.  Meets are intersections, joins the upward closure of
    pairwise meets, implication the pointwise clause; each is checked against
    the order computed from inclusion.
    """
    if not W.distributive:
        raise NotDistributive(W.dist_witness)
    scanned = scan_filters(W)
    principal = {W.up[w] for w in range(W.size)}
    if set(scanned) != principal:
        raise AssertionError("subset scan and principal filters disagree")
    masks = sorted(scanned, key=lambda m: (popcount(m), m))
    k = len(masks)
    leq = tuple(tuple(masks[i] & ~masks[j] == 0 for j in range(k)) for i in range(k))
    names = tuple("{" + ",".join(W.names[x] for x in bits(m)) + "}" for m in masks)
    lat = complete_lattice(FinPoset(leq, names))
    index = {m: i for i, m in enumerate(masks)}
    for i in range(k):
        for j in range(k):
            if masks[lat.meet[i][j]] != masks[i] & masks[j]:
                raise AssertionError("filter meet is not intersection")
            if masks[lat.join[i][j]] != join_mask(W, masks[i], masks[j]):
                raise AssertionError("filter join disagrees with closure of pairwise meets")
    if masks[lat.bottom] != 1 << W.top:
        raise AssertionError("bottom filter is not {top}")
    imp = tuple(tuple(index[heyting_mask(W, masks[i], masks[j])] for j in range(k)) for i in range(k))
    filters = tuple(Filter(W, m) for m in masks)
    return FilterLattice(W, filters, lat, index, imp)


@lru_cache(maxsize=256)
def directed_subsets(L: FinLattice) -> list[tuple[int, int]]:
    """``(members, supremum)`` for each non-empty directed subset of ``L``."""
    n = L.size
    # ub[x][y]: elements above both x and y
    ub = [[L.up[x] & L.up[y] for y in range(n)] for x in range(n)]
    out = []
    for X in range(1, 1 << n):
        elems = list(bits(X))
        directed = True
        for i, x in enumerate(elems):
            row = ub[x]
            for y in elems[i + 1:]:
                if X & row[y] == 0:
                    directed = False
                    break
            if not directed:
                break
        if directed:
            out.append((X, L.join_all(elems)))
    return out


def compact_elements(L: FinLattice) -> list[int]:
    """Elements ``d`` such that ``d ⊑ sup X`` forces ``d ⊑ x`` for some ``x ∈ X``, X directed."""
    directed = directed_subsets(L)
    out = []
    for d in range(L.size):
        if all(not L.leq(d, sup) or X & L.up[d] for X, sup in directed):
            out.append(d)
    return out


def compacts(FL: FilterLattice) -> list[Filter]:
    return [FL.filters[i] for i in compact_elements(FL.lattice)]


@dataclass
class CoherenceReport:
    ok: bool
    algebraic: bool
    compacts_are_principal: bool
    compacts_sublattice: bool
    iso_opposite_orientation: tuple[int, ...] | None
    iso_literal_orientation: tuple[int, ...] | None
    note: str
    failure: str = ""


ORIENTATION_NOTE = (
    "compact filters ordered by inclusion reverse the order of their generators; "
    "Filt(W) is recovered as the filters of the opposite of its compact elements"
)


def coherent_reconstruct(W: FinLattice) -> CoherenceReport:
    """Check that Filt(W) is coherent and rebuild it from its compact elements.

    Coherent here means every filter is the join of the compact filters below
    it, and the compacts are closed under binary meets and joins (and contain
    top and bottom).  The reconstruction is an isomorphism
    ``Filt(W) ≅ Filt(opposite(K))`` where ``K`` is the lattice of compacts.
    """
    FL = enumerate_filters(W)
    L = FL.lattice
    comp = compact_elements(L)
    cset = set(comp)
    principal = {FL.principal(w) for w in range(W.size)}
    compacts_are_principal = cset == principal
    algebraic = all(L.join_all(c for c in comp if L.leq(c, d)) == d for d in range(L.size))
    sublattice = (
        L.top in cset
        and L.bottom in cset
        and all(L.meet[a][b] in cset and L.join[a][b] in cset for a in comp for b in comp)
    )
    failure = ""
    iso_op = iso_lit = None
    if not (compacts_are_principal and algebraic and sublattice):
        failure = "Filt(W) is not coherent"
    else:
        K = complete_lattice(
            FinPoset(
                tuple(tuple(L.leq(a, b) for b in comp) for a in comp),
                tuple(L.names[c] for c in comp),
            )
        )
        iso_op = find_isomorphism(L, enumerate_filters(opposite(K)).lattice)
        iso_lit = find_isomorphism(L, enumerate_filters(K).lattice)
        if iso_op is None:
            failure = "Filt(W) is not isomorphic to Filt(op K(Filt(W)))"
    return CoherenceReport(
        ok=not failure,
        algebraic=algebraic,
        compacts_are_principal=compacts_are_principal,
        compacts_sublattice=sublattice,
        iso_opposite_orientation=iso_op,
        iso_literal_orientation=iso_lit,
        note=ORIENTATION_NOTE,
        failure=failure,
    )


def join_preserving_witness(f: MonotoneMap) -> tuple[int, ...] | None:
    """``None`` if ``f`` preserves bottom and binary joins, else a witness."""
    S, T = f.source, f.target
    if f.table[S.bottom] != T.bottom:
        return (S.bottom,)
    for a in range(S.size):
        for b in range(a + 1, S.size):
            if f.table[S.join[a][b]] != T.join[f.table[a]][f.table[b]]:
                return (a, b)
    return None


@dataclass(frozen=True)
class JoinPreservingMap:
    map: MonotoneMap

    def __post_init__(self):
        w = join_preserving_witness(self.map)
        if w is not None:
            raise NotJoinPreserving(w)

    @property
    def source(self) -> FinLattice:
        return self.map.source

    @property
    def target(self) -> FinLattice:
        return self.map.target

    @property
    def table(self) -> tuple[int, ...]:
        return self.map.table


@dataclass(frozen=True)
class ScottExtension:
    """Join-preserving extension of ``f : W -> L`` to the ideals of ``W``.

    ``domain`` is the filter locale of ``opposite(W)``, i.e. the ideals of
    ``W``; its principal elements are the down-sets ``↓w``.
    """

    f: JoinPreservingMap
    domain: FilterLattice
    sigma: tuple[int, ...]
    nerve: tuple[int, ...]

    def principal(self, w: int) -> int:
        return self.domain.principal(w)


def scott_extend(f: JoinPreservingMap | MonotoneMap) -> ScottExtension:
    if isinstance(f, MonotoneMap):
        f = JoinPreservingMap(f)
    W, L = f.source, f.target
    D = enumerate_filters(opposite(W))
    sigma = tuple(L.join_all(f.table[w] for w in bits(D.mask(i))) for i in range(D.size))
    nerve = []
    for y in range(L.size):
        below = [S for S in range(D.size) if L.leq(sigma[S], y)]
        best = [S for S in below if all(D.lattice.leq(T, S) for T in below)]
        if len(best) != 1:
            raise AssertionError(f"no largest ideal below {L.names[y]}")
        nerve.append(best[0])
    return ScottExtension(f, D, sigma, tuple(nerve))


def stable_witness(f: MonotoneMap) -> tuple[int, ...] | None:
    """``None`` if ``f`` preserves top and binary meets, else a witness."""
    S, T = f.source, f.target
    if f.table[S.top] != T.top:
        return (S.top,)
    for a in range(S.size):
        for b in range(a + 1, S.size):
            if f.table[S.meet[a][b]] != T.meet[f.table[a]][f.table[b]]:
                return (a, b)
    return None


def is_stable_map(f: MonotoneMap) -> tuple[bool, tuple[int, ...] | None]:
    w = stable_witness(f)
    return w is None, w


def _require_stable(f: MonotoneMap) -> None:
    w = stable_witness(f)
    if w is not None:
        raise NotStable(w)


def preimage_mask(f: MonotoneMap, F: int) -> int:
    return sum(1 << v for v in range(f.source.size) if F >> f.table[v] & 1)


def preimage(f: MonotoneMap, F: Filter) -> Filter:
    """``{v in source : f(v) ∈ F}``; refuses maps that are not stable."""
    _require_stable(f)
    if F.carrier != f.target:
        raise CarrierMismatch("filter does not live on the target of the map")
    return Filter(f.source, preimage_mask(f, F.members))


def preimage_table(f: MonotoneMap) -> tuple[FilterLattice, FilterLattice, tuple[int, ...]]:
    """The induced map Filt(target) -> Filt(source) as an index table."""
    _require_stable(f)
    src, tgt = enumerate_filters(f.source), enumerate_filters(f.target)
    table = tuple(src.of(preimage_mask(f, tgt.mask(i))) for i in range(tgt.size))
    return tgt, src, table


def left_adjoint(dom: FinLattice, cod: FinLattice, right: Sequence[int]) -> tuple[int, ...]:
    """Left adjoint of ``right : dom -> cod`` by exhaustive minimum scan.

    ``left(y)`` is the least ``x`` in ``dom`` with ``y ⊑ right(x)``.
    """
    out = []
    for y in range(cod.size):
        above = [x for x in range(dom.size) if cod.leq(y, right[x])]
        least = [x for x in above if all(dom.leq(x, z) for z in above)]
        if len(least) != 1:
            raise AssertionError(f"no left adjoint at {cod.names[y]}")
        out.append(least[0])
    return tuple(out)


@dataclass
class DualityReport:
    ok: bool
    recovered: tuple[int, ...]
    compacts_preserved: bool
    meets_preserved: bool
    directed_joins_preserved: bool


def duality_roundtrip(f: MonotoneMap) -> DualityReport:
    """Recover a stable map from the left adjoint of its filter preimage.

    The left adjoint sends each principal filter ``↑w`` to a principal
    filter; reading off its generator gives back ``f(w)``.
    """
    tgt, src, pre = preimage_table(f)
    Lt, Ls = tgt.lattice, src.lattice
    meets = all(
        pre[Lt.meet[i][j]] == Ls.meet[pre[i]][pre[j]] for i in range(tgt.size) for j in range(tgt.size)
    ) and pre[Lt.top] == Ls.top
    directed = all(
        pre[sup] == Ls.join_all(pre[x] for x in bits(X)) for X, sup in directed_subsets(Lt)
    )
    left = left_adjoint(Lt, Ls, pre)
    principal_src = {src.principal(w) for w in range(f.source.size)}
    principal_tgt = {tgt.principal(w) for w in range(f.target.size)}
    compacts_ok = all(left[c] in principal_tgt for c in principal_src)
    recovered = tuple(tgt.filters[left[src.principal(w)]].generator() for w in range(f.source.size))
    return DualityReport(
        ok=recovered == f.table and compacts_ok and meets,
        recovered=recovered,
        compacts_preserved=compacts_ok,
        meets_preserved=meets,
        directed_joins_preserved=directed,
    )


def monotone_maps_from(P: FinLattice, elems: Sequence[int], T: FinLattice):
    """All monotone assignments ``elems -> T`` (order inherited from ``P``)."""
    k = len(elems)
    order = list(elems)
    assign = [0] * k

    def go(i: int):
        if i == k:
            yield tuple(assign)
            return
        for t in range(T.size):
            ok = True
            for j in range(i):
                if P.leq(order[j], order[i]) and not T.leq(assign[j], t):
                    ok = False
                    break
                if P.leq(order[i], order[j]) and not T.leq(t, assign[j]):
                    ok = False
                    break
            if ok:
                assign[i] = t
                yield from go(i + 1)

    yield from go(0)


def stable_maps(S: FinLattice, T: FinLattice):
    """Every stable map ``S -> T``, generated from its values on meet-irreducibles.

    In a distributive lattice every element is the meet of the
    meet-irreducibles above it, and meet-irreducibles are meet-prime, so any
    monotone assignment on them extends to exactly one stable map.
    """
    mi = S.meet_irreducibles
    above = [[k for k, m in enumerate(mi) if S.leq(x, m)] for x in range(S.size)]
    for vals in monotone_maps_from(S, mi, T):
        table = tuple(T.meet_all(vals[k] for k in above[x]) for x in range(S.size))
        yield MonotoneMap(S, T, table)


def join_preserving_maps(S: FinLattice, T: FinLattice):
    """Every join-preserving map ``S -> T``, generated from its values on join-irreducibles."""
    ji = S.join_irreducibles
    below = [[k for k, j in enumerate(ji) if S.leq(j, x)] for x in range(S.size)]
    for vals in monotone_maps_from(S, ji, T):
        table = tuple(T.join_all(vals[k] for k in below[x]) for x in range(S.size))
        yield JoinPreservingMap(MonotoneMap(S, T, table))


def all_tables(S: FinLattice, T: FinLattice):
    """Every function ``S -> T`` as a table (brute-force oracle)."""
    return product(range(T.size), repeat=S.size)


def embedding_law_failure(W: FinLattice) -> str:
    """First way ``↑ : opposite(W) -> Filt(W)`` fails to be an order-embedding Heyting map.

    Checks order reflection, top, bottom, binary meets and joins, and
    implication, all computed in ``opposite(W)`` on one side and in
    Filt(W) on the other.  Empty string when every law holds.
    """
    Op = opposite(W)
    FL = enumerate_filters(W)
    L = FL.lattice
    up = [FL.principal(x) for x in range(W.size)]
    if up[Op.bottom] != L.bottom:
        return "bottom not preserved"
    if up[Op.top] != L.top:
        return "top not preserved"
    for a in range(W.size):
        for b in range(W.size):
            if Op.leq(a, b) != L.leq(up[a], up[b]):
                return f"order not reflected at ({a}, {b})"
            if up[Op.meet[a][b]] != L.meet[up[a]][up[b]]:
                return f"meet not preserved at ({a}, {b})"
            if up[Op.join[a][b]] != L.join[up[a]][up[b]]:
                return f"join not preserved at ({a}, {b})"
            if up[Op.implies[a][b]] != FL.imp[up[a]][up[b]]:
                return f"implication not preserved at ({a}, {b})"
    return ""
