from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import c3, d4
from stablelab.filters import (
    Filter,
    NotJoinPreserving,
    NotStable,
    all_tables,
    coherent_reconstruct,
    compact_elements,
    compacts,
    duality_roundtrip,
    embedding_law_failure,
    enumerate_filters,
    filter_heyting,
    filter_join,
    filter_meet,
    is_filter,
    is_stable_map,
    join_preserving_maps,
    join_preserving_witness,
    preimage,
    principal_filter,
    scott_extend,
    stable_maps,
    stable_witness,
)
from stablelab.lattice import (
    MonotoneMap,
    bits,
    chain,
    enumerate_distributive_lattices,
    identity_map,
    is_isomorphic,
    opposite,
)

ALL = list(enumerate_distributive_lattices(4))
SMALL = [L for L in ALL if L.size <= 4]


def mask(W, *names):
    return sum(1 << W.names.index(n) for n in names)


def subset_oracle(W):
    """Filters straight from the textbook definition."""
    out = []
    for S in range(1, 1 << W.size):
        members = bits(S)
        upper = all(not W.leq(w, v) or v in members for w in members for v in range(W.size))
        closed = all(W.meet[w][v] in members for w in members for v in members)
        if upper and closed:
            out.append(S)
    return out


class TestIsFilter:
    def test_top_only(self, D4):
        assert is_filter(D4, mask(D4, "1"))

    def test_missing_meet(self, D4):
        chk = is_filter(D4, mask(D4, "a", "b", "1"))
        assert not chk
        assert chk.clause == "meet-closed"
        assert chk.message == "missing a∧b"

    def test_empty(self, D4):
        assert not is_filter(D4, 0)

    def test_not_upper(self, D4):
        chk = is_filter(D4, mask(D4, "a"))
        assert not chk and chk.clause == "top"

    @pytest.mark.parametrize("W", ALL[:18], ids=lambda L: L.label())
    def test_matches_textbook_definition(self, W):
        assert [S for S in range(1, 1 << W.size) if is_filter(W, S)] == subset_oracle(W)


class TestPrincipal:
    def test_up_a(self, D4):
        assert principal_filter(D4, D4.names.index("a")).members == mask(D4, "a", "1")

    @pytest.mark.parametrize("W", SMALL, ids=lambda L: L.label())
    def test_extremes(self, W):
        FL = enumerate_filters(W)
        assert FL.principal(W.top) == FL.bottom
        assert FL.principal(W.bottom) == FL.top
        assert FL.mask(FL.bottom) == 1 << W.top


class TestEnumerateFilters:
    def test_c2(self, C2):
        FL = enumerate_filters(C2)
        assert [F.members for F in FL.filters] == [0b10, 0b11]

    def test_d4(self, D4):
        assert enumerate_filters(D4).size == 4

    def test_p5_is_opposite(self, P5):
        FL = enumerate_filters(P5)
        assert FL.size == 5
        assert is_isomorphic(FL.lattice, opposite(P5))

    @pytest.mark.parametrize("W", ALL, ids=lambda L: L.label())
    def test_locale_laws(self, W):
        FL = enumerate_filters(W)
        L = FL.lattice
        assert L.distributive
        assert {FL.mask(i) for i in range(FL.size)} == {W.up[w] for w in range(W.size)}
        for i, j in product(range(FL.size), repeat=2):
            assert FL.mask(L.meet[i][j]) == FL.mask(i) & FL.mask(j)
            assert L.leq(i, j) == (FL.mask(i) & ~FL.mask(j) == 0)
            # order on principals is reversed
        for a, b in product(range(W.size), repeat=2):
            assert L.leq(FL.principal(a), FL.principal(b)) == W.leq(b, a)

    @pytest.mark.parametrize("W", ALL[:18], ids=lambda L: L.label())
    def test_heyting_adjunction(self, W):
        FL = enumerate_filters(W)
        L = FL.lattice
        for g, f1, f2 in product(range(FL.size), repeat=3):
            assert L.leq(L.meet[g][f1], f2) == L.leq(g, FL.imp[f1][f2])

    @pytest.mark.parametrize("W", ALL, ids=lambda L: L.label())
    def test_principal_embedding_laws(self, W):
        assert embedding_law_failure(W) == ""


class TestFilterAlgebra:
    def test_join_d4(self, D4):
        a, b = (principal_filter(D4, D4.names.index(n)) for n in "ab")
        assert filter_join(a, b).members == D4.full
        assert filter_meet(a, b).members == mask(D4, "1")

    def test_join_unit(self, D4):
        bottom = Filter(D4, mask(D4, "1"))
        for F in enumerate_filters(D4).filters:
            assert filter_join(F, bottom) == F

    def test_heyting_d4(self, D4):
        a = principal_filter(D4, D4.names.index("a"))
        assert filter_heyting(a, Filter(D4, mask(D4, "1"))).members == mask(D4, "b", "1")

    def test_heyting_self(self, D4):
        for F in enumerate_filters(D4).filters:
            assert filter_heyting(F, F).members == D4.full

    def test_heyting_c3(self, C3):
        m, top = principal_filter(C3, 1), principal_filter(C3, 2)
        assert filter_heyting(m, top) == top

    def test_carrier_mismatch(self, D4, C3):
        with pytest.raises(ValueError):
            filter_join(principal_filter(D4, 0), principal_filter(C3, 0))

    def test_rejects_non_filter(self, D4):
        with pytest.raises(ValueError):
            Filter(D4, mask(D4, "a", "b", "1"))


class TestCompacts:
    def test_d4_all_compact(self, D4):
        assert len(compacts(enumerate_filters(D4))) == 4

    def test_c2_all_compact(self, C2):
        assert len(compacts(enumerate_filters(C2))) == 2

    @pytest.mark.parametrize("W", ALL[:18], ids=lambda L: L.label())
    def test_compacts_are_opposite(self, W):
        FL = enumerate_filters(W)
        comp = compact_elements(FL.lattice)
        assert len(comp) == W.size
        assert {FL.principal(w) for w in range(W.size)} == set(comp)


class TestCoherence:
    @pytest.mark.parametrize("W", [chain(1), c3(), d4()], ids=["C1", "C3", "D4"])
    def test_examples(self, W):
        r = coherent_reconstruct(W)
        assert r.ok and r.algebraic and r.compacts_sublattice
        assert r.iso_opposite_orientation is not None

    def test_c1_identity(self):
        assert coherent_reconstruct(chain(1)).iso_opposite_orientation == (0,)

    def test_orientation_note(self, P5):
        # the unreversed reading fails exactly on lattices that are not self-dual
        r = coherent_reconstruct(P5)
        assert r.ok and r.iso_literal_orientation is None
        assert "opposite" in r.note


@pytest.mark.parametrize("W", ALL, ids=lambda L: L.label())
def test_literal_orientation_only_for_self_dual(W):
    r = coherent_reconstruct(W)
    assert (r.iso_literal_orientation is not None) == is_isomorphic(W, opposite(W))


class TestScottExtension:
    def test_meet_with_a(self, D4):
        a = D4.names.index("a")
        f = MonotoneMap(D4, D4, tuple(D4.meet[x][a] for x in range(D4.size)))
        ext = scott_extend(f)
        for x in range(D4.size):
            assert ext.sigma[ext.principal(x)] == D4.meet[x][a]

    @pytest.mark.parametrize("W", SMALL, ids=lambda L: L.label())
    def test_extending_the_unit_gives_identity(self, W):
        D = enumerate_filters(opposite(W))
        unit = MonotoneMap(W, D.lattice, tuple(D.principal(w) for w in range(W.size)))
        ext = scott_extend(unit)
        assert ext.sigma == tuple(range(D.size))

    def test_adjunction(self, D4, C3):
        for f in join_preserving_maps(D4, C3):
            ext = scott_extend(f)
            D = ext.domain.lattice
            for S, y in product(range(D.size), range(C3.size)):
                assert C3.leq(ext.sigma[S], y) == D.leq(S, ext.nerve[y])

    def test_rejects_non_join_preserving(self, D4):
        const_top = MonotoneMap(D4, D4, (3, 3, 3, 3))
        with pytest.raises(NotJoinPreserving):
            scott_extend(const_top)


class TestStableMaps:
    def d4_to_c2(self, D4, C2):
        return MonotoneMap(D4, C2, (0, 0, 1, 1))  # {0,a} -> 0, {b,1} -> 1

    def test_identity(self, D4):
        assert is_stable_map(identity_map(D4)) == (True, None)

    def test_d4_to_c2(self, D4, C2):
        assert is_stable_map(self.d4_to_c2(D4, C2))[0]

    def test_constant_bottom(self, D4):
        ok, witness = is_stable_map(MonotoneMap(D4, D4, (0, 0, 0, 0)))
        assert not ok and witness == (D4.top,)

    def test_preimage(self, D4, C2):
        f = self.d4_to_c2(D4, C2)
        assert preimage(f, principal_filter(C2, 1)).members == mask(D4, "b", "1")
        for F in enumerate_filters(D4).filters:
            assert preimage(identity_map(D4), F) == F

    def test_preimage_of_constant_top(self, D4, C2):
        f = MonotoneMap(D4, C2, (1, 1, 1, 1))
        for F in enumerate_filters(C2).filters:
            assert preimage(f, F).members == D4.full

    def test_preimage_refuses_unstable(self, D4):
        with pytest.raises(NotStable):
            preimage(MonotoneMap(D4, D4, (0, 0, 0, 0)), principal_filter(D4, 0))

    @pytest.mark.parametrize("f", ["identity", "d4c2", "top"])
    def test_roundtrip_examples(self, D4, C2, f):
        g = {"identity": identity_map(D4), "d4c2": self.d4_to_c2(D4, C2),
             "top": MonotoneMap(D4, C2, (1, 1, 1, 1))}[f]
        r = duality_roundtrip(g)
        assert r.ok and r.recovered == g.table


def _monotone(S, T, table):
    try:
        return MonotoneMap(S, T, table)
    except ValueError:
        return None


@pytest.mark.parametrize("S", SMALL, ids=lambda L: L.label())
@pytest.mark.parametrize("T", SMALL, ids=lambda L: L.label())
def test_map_generators_match_brute_force(S, T):
    maps = [m for m in (_monotone(S, T, t) for t in all_tables(S, T)) if m is not None]
    stable = {m.table for m in maps if stable_witness(m) is None}
    joinp = {m.table for m in maps if join_preserving_witness(m) is None}
    assert {f.table for f in stable_maps(S, T)} == stable
    assert {f.table for f in join_preserving_maps(S, T)} == joinp


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(ALL[:18]), st.data())
def test_filter_join_is_least_upper_bound(W, data):
    FL = enumerate_filters(W)
    i = data.draw(st.integers(0, FL.size - 1))
    j = data.draw(st.integers(0, FL.size - 1))
    J = filter_join(FL.filters[i], FL.filters[j]).members
    uppers = [FL.mask(k) for k in range(FL.size)
              if FL.mask(i) & ~FL.mask(k) == 0 and FL.mask(j) & ~FL.mask(k) == 0]
    assert J in uppers and all(J & ~U == 0 for U in uppers)
