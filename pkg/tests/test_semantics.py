import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import c3, d4
from stablelab.filters import is_filter, principal_filter
from stablelab.lattice import CapExceeded, chain, check_poset, enumerate_distributive_lattices
from stablelab.logic import CURATED_THEOREMS, parse, random_formula
from stablelab.modal import adjunction_from_dia, enumerate_stable_bimodules, identity_bimodule
from stablelab.semantics import (
    Forcing,
    HeytingAssignment,
    KripkeModel,
    MissingBimodule,
    StableModel,
    UnboundAtom,
    build_upset_model,
    countermodel_search,
    eval_filter,
    explain,
    force,
    forcing_set,
    heyting_eval,
    kripke_force,
    kripke_from_stable,
    valuations,
)

ALL = list(enumerate_distributive_lattices(3))
PEIRCE = parse("((p->q)->p)->p")
LEM = parse("p | ~p")


def d4_model(**extra):
    W = d4()
    val = {"p": principal_filter(W, 1), "q": principal_filter(W, 2)}
    return StableModel(W, val, **extra)


def naive_force(M, w, f):
    """Clause-by-clause forcing without memo or bit tricks."""
    W = M.frame
    kind = type(f).__name__
    if kind == "Atom":
        return w in M.valuation[f.name]
    if kind == "Top":
        return True
    if kind == "Bot":
        return w == W.top
    if kind == "And":
        return naive_force(M, w, f.left) and naive_force(M, w, f.right)
    if kind == "Or":
        return any(W.leq(W.meet[v1][v2], w) and naive_force(M, v1, f.left) and naive_force(M, v2, f.right)
                   for v1 in range(W.size) for v2 in range(W.size))
    if kind == "Imp":
        return all(not naive_force(M, v, f.left) or naive_force(M, v, f.right)
                   for v in range(W.size) if W.leq(w, v))
    R = M.bimodule
    if kind == "Dia":
        return any(R.related(v, w) and naive_force(M, v, f.sub) for v in range(W.size))
    return all(naive_force(M, v, f.sub) for v in range(W.size) if R.related(w, v))


class TestForce:
    def test_d4_disjunction(self):
        M = d4_model()
        assert force(M, 0, parse("p | q"))
        assert not force(M, 0, parse("p"))
        assert Forcing(M).fan_witness(0, parse("p | q")) == (1, 2)

    def test_explain_names_witnesses(self):
        lines = explain(d4_model(), 0, parse("p | q"))
        assert "witnesses (a,b)" in lines[0]

    @pytest.mark.parametrize("W", ALL, ids=lambda L: L.label())
    def test_supernova_forces_everything(self, W):
        for val in valuations(W, ["p", "q"]):
            M = StableModel(W, val)
            ev = Forcing(M)
            assert ev.holds(W.top, parse("bot"))
            for f in CURATED_THEOREMS + (PEIRCE, LEM, parse("p & q & bot")):
                assert ev.holds(W.top, f)

    @pytest.mark.parametrize("W", ALL, ids=lambda L: L.label())
    def test_or_bot_is_neutral(self, W):
        for val in valuations(W, ["p"]):
            M = StableModel(W, val)
            assert forcing_set(M, parse("p | bot")) == forcing_set(M, parse("p"))

    @pytest.mark.parametrize("W", ALL, ids=lambda L: L.label())
    def test_identity_bimodule_modalities(self, W):
        B = identity_bimodule(W)
        for val in valuations(W, ["p"]):
            M = StableModel(W, val, B)
            p = forcing_set(M, parse("p"))
            assert forcing_set(M, parse("dia p")) == p
            assert forcing_set(M, parse("box p")) == p

    def test_strict_and_lenient(self):
        M = d4_model()
        with pytest.raises(UnboundAtom):
            force(M, 0, parse("r"))
        assert forcing_set(M, parse("r"), strict=False) == 1 << M.frame.top
        assert eval_filter(M, parse("r"), strict=False).members == 1 << M.frame.top

    def test_modal_needs_bimodule(self):
        with pytest.raises(MissingBimodule):
            force(d4_model(), 0, parse("dia p"))

    def test_rejects_foreign_valuation(self):
        with pytest.raises(ValueError):
            StableModel(d4(), {"p": principal_filter(c3(), 0)})


class TestEvalFilter:
    def test_top_and_bot(self):
        M = d4_model()
        assert eval_filter(M, parse("top")).members == M.frame.full
        assert eval_filter(M, parse("bot")).members == 1 << M.frame.top

    def test_d4_join(self):
        assert eval_filter(d4_model(), parse("p | q")).members == d4().full


class TestHeytingEval:
    def test_c3_peirce(self):
        H = c3()
        assert heyting_eval(HeytingAssignment(H, {"p": 1, "q": 0}), PEIRCE) == 1

    def test_c3_lem(self):
        assert heyting_eval(HeytingAssignment(c3(), {"p": 1}), LEM) == 1

    def test_d4_lem(self):
        H = d4()
        assert heyting_eval(HeytingAssignment(H, {"p": 1}), LEM) == H.top


class TestUpsetModel:
    def test_c3_peirce(self):
        M = build_upset_model(HeytingAssignment(c3(), {"p": 1, "q": 0}))
        assert [force(M, w, PEIRCE) for w in range(3)] == [True, True, False]

    def test_c1(self):
        M = build_upset_model(HeytingAssignment(chain(1), {"p": 0, "q": 0}))
        for f in (PEIRCE, LEM, parse("bot"), parse("p & ~p")):
            assert force(M, 0, f)

    def test_d4_lem_everywhere(self):
        M = build_upset_model(HeytingAssignment(d4(), {"p": 1}))
        assert forcing_set(M, LEM) == M.frame.full

    def test_modal_transport(self):
        H = d4()
        A = adjunction_from_dia(H, tuple(H.meet[x][1] for x in range(H.size)))
        for x in range(H.size):
            asg = HeytingAssignment(H, {"p": x}, A)
            M = build_upset_model(asg)
            for text in ("dia p", "box p", "box (p | dia p) -> p"):
                f = parse(text)
                assert eval_filter(M, f).members == H.down[heyting_eval(asg, f)]


class TestKripke:
    def chain_model(self):
        P = check_poset([[True, True], [False, True]])
        return KripkeModel(P, {"p": 0b10})

    def test_double_negation(self):
        K = self.chain_model()
        assert kripke_force(K, 0, parse("~~p"))
        assert not kripke_force(K, 0, parse("p"))

    def test_bot_never(self):
        K = self.chain_model()
        assert not any(kripke_force(K, w, parse("bot")) for w in range(2))

    @pytest.mark.parametrize("W", ALL, ids=lambda L: L.label())
    def test_identity_relation_box(self, W):
        B = identity_bimodule(W)
        for val in valuations(W, ["p"]):
            K = kripke_from_stable(StableModel(W, val, B))
            for w in range(W.size):
                assert kripke_force(K, w, parse("box p")) == kripke_force(K, w, parse("p"))

    def test_rejects_non_upper_valuation(self):
        P = check_poset([[True, True], [False, True]])
        with pytest.raises(ValueError):
            KripkeModel(P, {"p": 0b01})

    def test_disjunction_differs(self):
        M = d4_model()
        assert force(M, 0, parse("p | q"))
        assert not kripke_force(kripke_from_stable(M), 0, parse("p | q"))


class TestSearch:
    @pytest.mark.parametrize("f", [PEIRCE, LEM], ids=["peirce", "lem"])
    def test_refuted_on_three_chain(self, f):
        found = countermodel_search(f, 4)
        W = found.model.frame
        assert W.size == 3 and W.names == ("{}", "{x}", "{x,y}")
        assert found.world == 0
        assert not force(found.model, found.world, f)
        assert countermodel_search(f, 4).model == found.model

    @pytest.mark.parametrize("text", ["p -> p", "bot -> p"])
    def test_exhausted(self, text):
        assert countermodel_search(parse(text), 4) is None

    def test_modal_search_uses_bimodules(self):
        found = countermodel_search(parse("dia p -> p"), 2)
        assert found is not None and found.model.bimodule is not None

    def test_cap(self):
        with pytest.raises(CapExceeded):
            countermodel_search(parse("p & q & r"), 2)
        with pytest.raises(CapExceeded):
            countermodel_search(parse("p"), 9)


MODELS = [
    StableModel(W, val, B)
    for W in ALL
    if W.size <= 5
    for B in enumerate_stable_bimodules(W)[:6]
    for val in valuations(W, ["p", "q"])
]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(MODELS), st.integers(0, 2**32))
def test_forcing_matches_naive_clauses(M, seed):
    import random

    f = random_formula(random.Random(seed), 3, modal=True)
    S = forcing_set(M, f)
    assert is_filter(M.frame, S)
    assert S == eval_filter(M, f).members
    assert [naive_force(M, w, f) for w in M.worlds] == [bool(S >> w & 1) for w in M.worlds]
