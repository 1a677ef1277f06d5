"""Finite posets and distributive lattices.

Elements are dense indices ``0..n-1`` and subsets of a carrier are Python
ints used as bit-sets.  Every value built here is validated on construction
and never mutated afterwards.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import permutations, product
from typing import Iterator, Sequence

DEFAULT_MAX_BASE = 4
CANONICAL_CAP = 8
DOWNSET_CAP = 256


class PosetError(ValueError):
    """A table that is not a partial order; ``axiom`` names the first failure."""

    def __init__(self, axiom: str, witness: tuple[int, ...], message: str = ""):
        self.axiom = axiom
        self.witness = witness
        super().__init__(message or f"{axiom} violation at {witness}")


class NotALattice(ValueError):
    def __init__(self, pair: tuple[int, int], missing: str, names: Sequence[str] | None = None):
        self.pair = pair
        self.missing = missing
        a, b = pair if names is None else (names[pair[0]], names[pair[1]])
        super().__init__(f"no {missing} for ({a}, {b})")


class NotDistributive(ValueError):
    def __init__(self, witness: tuple[int, int, int] | None, message: str = ""):
        self.witness = witness
        super().__init__(message or f"lattice is not distributive: witness {witness}")


class CapExceeded(ValueError):
    pass


def max_base_cap() -> int:
    """Largest base-poset size the sweeps accept (``STABLELAB_MAX_BASE`` overrides)."""
    raw = os.environ.get("STABLELAB_MAX_BASE")
    if raw is None:
        return DEFAULT_MAX_BASE
    try:
        return int(raw)
    except ValueError:
        raise CapExceeded(f"STABLELAB_MAX_BASE must be an integer, got {raw!r}") from None


@lru_cache(maxsize=1 << 17)
def bits(mask: int) -> tuple[int, ...]:
    """Indices set in ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class FinPoset:
    leq: tuple[tuple[bool, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(len(self.leq))))

    @property
    def size(self) -> int:
        return len(self.leq)

    @cached_property
    def up(self) -> tuple[int, ...]:
        n = self.size
        return tuple(mask_of(j for j in range(n) if self.leq[i][j]) for i in range(n))

    @cached_property
    def down(self) -> tuple[int, ...]:
        n = self.size
        return tuple(mask_of(j for j in range(n) if self.leq[j][i]) for i in range(n))

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        """Pairs ``(i, j)`` where ``j`` covers ``i``."""
        out = []
        for i in range(self.size):
            strict_up = self.up[i] & ~(1 << i)
            for j in bits(strict_up):
                between = strict_up & self.down[j] & ~(1 << j)
                if not between:
                    out.append((i, j))
        return tuple(out)

    def transpose(self) -> "FinPoset":
        n = self.size
        return FinPoset(tuple(tuple(self.leq[j][i] for j in range(n)) for i in range(n)), self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown element {name!r}") from None


def check_poset(leq: Sequence[Sequence[bool]], names: Sequence[str] = ()) -> FinPoset:
    """Validate a square boolean table as a partial order.

    Raises :class:`PosetError` naming the first violated axiom, checked in the
    order reflexivity, antisymmetry, transitivity, with the lexicographically
    first witness.
    """
    n = len(leq)
    if any(len(row) != n for row in leq):
        raise PosetError("shape", (n,), "order table must be square")
    if names and len(names) != n:
        raise PosetError("shape", (n, len(names)), "names do not match table size")
    table = tuple(tuple(bool(x) for x in row) for row in leq)
    for i in range(n):
        if not table[i][i]:
            raise PosetError("reflexivity", (i,))
    for i in range(n):
        for j in range(n):
            if i != j and table[i][j] and table[j][i]:
                raise PosetError("antisymmetry", (i, j))
    for i in range(n):
        for j in range(n):
            if not table[i][j]:
                continue
            for k in range(n):
                if table[j][k] and not table[i][k]:
                    raise PosetError("transitivity", (i, j, k))
    return FinPoset(table, tuple(names))


def poset_from_pairs(names: Sequence[str], pairs: Sequence[tuple[str, str]]) -> FinPoset:
    """Reflexive-transitive closure of generating pairs ``(lower, upper)``."""
    n = len(names)
    idx = {name: i for i, name in enumerate(names)}
    if len(idx) != n:
        raise PosetError("shape", (n,), "duplicate element names")
    rel = [[i == j for j in range(n)] for i in range(n)]
    for a, b in pairs:
        try:
            rel[idx[a]][idx[b]] = True
        except KeyError as e:
            raise PosetError("shape", (), f"unknown element {e.args[0]!r} in order") from None
    for k in range(n):
        for i in range(n):
            if rel[i][k]:
                for j in range(n):
                    if rel[k][j]:
                        rel[i][j] = True
    return check_poset(rel, names)


@dataclass(frozen=True)
class FinLattice:
    """A finite lattice with total meet/join tables.

    Build instances with :func:`complete_lattice`, which computes every table
    from the order and recomputes the distributivity certificate.
    """

    poset: FinPoset
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    bottom: int
    top: int
    distributive: bool
    dist_witness: tuple[int, int, int] | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return self.poset.size

    @property
    def names(self) -> tuple[str, ...]:
        return self.poset.names

    @property
    def up(self) -> tuple[int, ...]:
        return self.poset.up

    @property
    def down(self) -> tuple[int, ...]:
        return self.poset.down

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def leq(self, a: int, b: int) -> bool:
        return self.poset.leq[a][b]

    def join_all(self, elems) -> int:
        acc = self.bottom
        for e in elems:
            acc = self.join[acc][e]
        return acc

    def meet_all(self, elems) -> int:
        acc = self.top
        for e in elems:
            acc = self.meet[acc][e]
        return acc

    @cached_property
    def implies(self) -> tuple[tuple[int, ...], ...]:
        n = self.size
        return tuple(tuple(heyting_implies(self, a, b) for b in range(n)) for a in range(n))

    @cached_property
    def join_irreducibles(self) -> tuple[int, ...]:
        lower_covers = [0] * self.size
        for i, j in self.poset.covers:
            lower_covers[j] += 1
        return tuple(i for i in range(self.size) if lower_covers[i] == 1)

    @cached_property
    def meet_irreducibles(self) -> tuple[int, ...]:
        upper_covers = [0] * self.size
        for i, j in self.poset.covers:
            upper_covers[i] += 1
        return tuple(i for i in range(self.size) if upper_covers[i] == 1)

    def label(self) -> str:
        return f"L{self.size}[{','.join(self.names)}]"

    def __repr__(self):
        return f"FinLattice(size={self.size}, names={list(self.names)}, distributive={self.distributive})"


def _bound(poset: FinPoset, a: int, b: int, lower: bool) -> int | None:
    if lower:
        cands = poset.down[a] & poset.down[b]
        rel = poset.down
    else:
        cands = poset.up[a] & poset.up[b]
        rel = poset.up
    for g in bits(cands):
        # greatest lower bound: every candidate lies below g
        if cands & ~rel[g] == 0:
            return g
    return None


def distributivity_witness(meet, join, n: int) -> tuple[int, int, int] | None:
    """First triple ``(a, x, y)`` with ``a∧(x∨y) != (a∧x)∨(a∧y)``."""
    for a in range(n):
        ma = meet[a]
        for x in range(n):
            jx = join[x]
            for y in range(n):
                if ma[jx[y]] != join[ma[x]][ma[y]]:
                    return (a, x, y)
    return None


def dual_distributivity_witness(meet, join, n: int) -> tuple[int, int, int] | None:
    """First triple ``(a, x, y)`` with ``a∨(x∧y) != (a∨x)∧(a∨y)``."""
    return distributivity_witness(join, meet, n)


def complete_lattice(poset: FinPoset) -> FinLattice:
    """Compute meet/join tables by exhaustive bound scan.

    Raises :class:`NotALattice` with the first pair lacking a meet or join.
    """
    n = poset.size
    if n == 0:
        raise NotALattice((0, 0), "elements")
    meet = []
    join = []
    for a in range(n):
        mrow, jrow = [], []
        for b in range(n):
            m = _bound(poset, a, b, lower=True)
            if m is None:
                raise NotALattice((a, b), "meet", poset.names)
            j = _bound(poset, a, b, lower=False)
            if j is None:
                raise NotALattice((a, b), "join", poset.names)
            mrow.append(m)
            jrow.append(j)
        meet.append(tuple(mrow))
        join.append(tuple(jrow))
    meet_t, join_t = tuple(meet), tuple(join)
    bottom = next(i for i in range(n) if poset.up[i] == (1 << n) - 1)
    top = next(i for i in range(n) if poset.down[i] == (1 << n) - 1)
    witness = distributivity_witness(meet_t, join_t, n)
    return FinLattice(poset, meet_t, join_t, bottom, top, witness is None, witness)


def lattice_from_pairs(names: Sequence[str], pairs: Sequence[tuple[str, str]]) -> FinLattice:
    return complete_lattice(poset_from_pairs(names, pairs))


def heyting_implies(H: FinLattice, a: int, b: int) -> int:
    """Relative pseudocomplement: the largest ``c`` with ``c ∧ a ⊑ b``."""
    if not H.distributive:
        raise NotDistributive(H.dist_witness)
    cands = [c for c in range(H.size) if H.leq(H.meet[c][a], b)]
    best = H.join_all(cands)
    # in a finite distributive lattice the join of the candidates is itself one
    assert H.leq(H.meet[best][a], b)
    return best


def opposite(L: FinLattice) -> FinLattice:
    return complete_lattice(L.poset.transpose())


def birkhoff(base: FinPoset, cap: int = DOWNSET_CAP) -> FinLattice:
    """Lattice of downsets of ``base`` ordered by inclusion.

    Elements are sorted by (size, bit pattern), so the empty downset is
    index 0 and the whole base is the last index.
    """
    n = base.size
    downsets = []
    for s in range(1 << n):
        if all(base.down[i] & ~s == 0 for i in bits(s)):
            downsets.append(s)
            if len(downsets) > cap:
                raise CapExceeded(f"more than {cap} downsets")
    downsets.sort(key=lambda s: (bin(s).count("1"), s))
    m = len(downsets)
    leq = tuple(tuple(downsets[i] & ~downsets[j] == 0 for j in range(m)) for i in range(m))

    def name(s: int) -> str:
        return "{" + ",".join(base.names[i] for i in bits(s)) + "}"

    return complete_lattice(FinPoset(leq, tuple(name(s) for s in downsets)))


def chain(n: int) -> FinLattice:
    """The ``n``-element chain ``0 < 1 < ... < n-1``."""
    return complete_lattice(FinPoset(tuple(tuple(i <= j for j in range(n)) for i in range(n))))


def poset_code(leq, perm: Sequence[int]) -> tuple[bool, ...]:
    n = len(perm)
    return tuple(leq[perm[i]][perm[j]] for i in range(n) for j in range(n))


def canonical_form(leq) -> tuple[bool, ...]:
    """Lexicographically largest relabelled adjacency code; equal iff isomorphic."""
    n = len(leq)
    if n > CANONICAL_CAP:
        raise CapExceeded(f"canonical form limited to {CANONICAL_CAP} elements")
    return max(poset_code(leq, p) for p in permutations(range(n)))


def labelled_posets(n: int) -> Iterator[FinPoset]:
    """Posets on ``0..n-1`` whose order extends the natural order of labels.

    Every finite poset has such a labelling (a linear extension), so this
    covers every isomorphism class.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for choice in product((False, True), repeat=len(pairs)):
        rel = [[i == j for j in range(n)] for i in range(n)]
        for (i, j), on in zip(pairs, choice):
            rel[i][j] = on
        ok = all(
            rel[i][k] for i, j in pairs if rel[i][j] for k in range(j + 1, n) if rel[j][k]
        )
        if ok:
            yield FinPoset(tuple(tuple(r) for r in rel))


def unlabelled_posets(n: int) -> list[FinPoset]:
    """One representative per isomorphism class, sorted by canonical form."""
    seen: dict[tuple[bool, ...], FinPoset] = {}
    for p in labelled_posets(n):
        code = canonical_form(p.leq)
        if code not in seen:
            perm = max(permutations(range(n)), key=lambda q: poset_code(p.leq, q))
            rel = tuple(tuple(p.leq[perm[i]][perm[j]] for j in range(n)) for i in range(n))
            seen[code] = FinPoset(rel, tuple("xyzuvw"[i] for i in range(n)) if n <= 6 else ())
    return [seen[c] for c in sorted(seen)]


def enumerate_distributive_lattices(max_base_size: int, cap: int | None = None) -> Iterator[FinLattice]:
    """Yield ``birkhoff(P)`` for every unlabelled poset with at most ``max_base_size`` elements.

    Order: by base size, then by canonical form of the base.
    """
    limit = max_base_cap() if cap is None else cap
    if max_base_size > limit:
        raise CapExceeded(f"max base size {max_base_size} exceeds cap {limit}")
    for k in range(max_base_size + 1):
        for base in unlabelled_posets(k):
            yield birkhoff(base)


@dataclass(frozen=True)
class MonotoneMap:
    source: FinLattice
    target: FinLattice
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.source.size:
            raise ValueError("map table must have one entry per source element")
        if any(not 0 <= t < self.target.size for t in self.table):
            raise ValueError("map table entry out of range")
        for a in range(self.source.size):
            for b in bits(self.source.up[a]):
                if not self.target.leq(self.table[a], self.table[b]):
                    raise ValueError(f"map is not monotone at ({a}, {b})")

    def __call__(self, x: int) -> int:
        return self.table[x]


def identity_map(L: FinLattice) -> MonotoneMap:
    return MonotoneMap(L, L, tuple(range(L.size)))


def find_isomorphism(A: FinLattice | FinPoset, B: FinLattice | FinPoset) -> tuple[int, ...] | None:
    """Order isomorphism ``A -> B`` as an index table, or ``None``.

    Backtracking search; candidates are pruned by the number of elements
    above and below each element.
    """
    pa = A.poset if isinstance(A, FinLattice) else A
    pb = B.poset if isinstance(B, FinLattice) else B
    n = pa.size
    if n != pb.size:
        return None

    def sig(p: FinPoset, i: int):
        return (bin(p.up[i]).count("1"), bin(p.down[i]).count("1"))

    sa = [sig(pa, i) for i in range(n)]
    sb = [sig(pb, i) for i in range(n)]
    if sorted(sa) != sorted(sb):
        return None
    order = sorted(range(n), key=lambda i: sa[i])
    image = [-1] * n
    used = [False] * n

    def go(k: int) -> bool:
        if k == n:
            return True
        a = order[k]
        for b in range(n):
            if used[b] or sb[b] != sa[a]:
                continue
            ok = True
            for prev in order[:k]:
                pb_ = image[prev]
                if pa.leq[a][prev] != pb.leq[b][pb_] or pa.leq[prev][a] != pb.leq[pb_][b]:
                    ok = False
                    break
            if ok:
                image[a] = b
                used[b] = True
                if go(k + 1):
                    return True
                used[b] = False
        image[a] = -1
        return False

    return tuple(image) if go(0) else None


def is_isomorphic(A, B) -> bool:
    return find_isomorphism(A, B) is not None
