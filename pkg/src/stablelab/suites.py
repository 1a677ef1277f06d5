"""Exhaustive law suites over the enumerated universe of small frames.

Each suite returns a :class:`Report`.  Frames come from
:func:`enumerate_distributive_lattices` in canonical order, so the first
counterexample (if any) is deterministic.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Callable

from .filters import (
    coherent_reconstruct,
    duality_roundtrip,
    embedding_law_failure,
    is_filter,
    is_stable_map,
    join_preserving_maps,
    principal_filter,
    scott_extend,
    stable_maps,
)
from .lattice import FinLattice, bits, enumerate_distributive_lattices
from .logic import (
    CURATED_THEOREMS,
    MODAL_AXIOMS,
    Or,
    in_fragment,
    parse,
    random_formulas,
    to_text,
)
from .modal import (
    LatticeAdjunction,
    bimodule_from_adjunction,
    bimodule_relations,
    check_adjunction_on_filters,
    enumerate_stable_bimodules,
    modal_embedding_check,
    right_adjoint_of,
    roundtrip_check,
    stable_bimodules_by_filtering,
)
from .semantics import (
    Forcing,
    HeytingAssignment,
    StableModel,
    build_upset_model,
    countermodel_search,
    eval_filter_mask,
    heyting_eval,
    kripke_force,
    kripke_set,
    kripke_from_stable,
    valuations,
)

SEED = 1729
RANDOM_FORMULAS = 200
RANDOM_DEPTH = 4
ATOMS = ("p", "q")
ADJUNCTION_MAX_SIZE = 5
EMBEDDING_MAX_SIZE = 8
DUALITY_MAX_SIZE = 8
SCOTT_MAX_SIZE = 8
SCOTT_TARGET_MAX_SIZE = 4
UNIQUENESS_MAX_SIZE = 4
PARSER_SAMPLES = 10_000


@dataclass
class Report:
    suite: str
    max_base: int
    instances: int = 0
    checks: int = 0
    failures: int = 0
    counterexample: dict | None = None
    duration: float = 0.0
    notes: list[str] = field(default_factory=list)
    breakdown: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def fail(self, **details) -> None:
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = details

    def row(self, label: str, size: int) -> dict:
        r = {"frame": label, "size": size, "instances": 0, "checks": 0, "failures": 0}
        self.breakdown.append(r)
        return r

    def to_dict(self, with_duration: bool = True) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        if not with_duration:
            d.pop("duration")
        return d

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.suite}: {self.instances} instances, {self.checks} checks, "
            f"{self.failures} failures, {self.duration:.1f}s"
        )


class _Tally:
    """Keeps report totals and the current breakdown row in step."""

    def __init__(self, report: Report, row: dict):
        self.report = report
        self.row = row

    def instance(self, k: int = 1):
        self.report.instances += k
        self.row["instances"] += k

    def check(self, ok: bool, **details) -> bool:
        self.report.checks += 1
        self.row["checks"] += 1
        if not ok:
            self.row["failures"] += 1
            self.report.fail(**details)
        return ok


def frames(max_base: int, max_size: int | None = None) -> list[FinLattice]:
    return [
        W for W in enumerate_distributive_lattices(max_base)
        if max_size is None or W.size <= max_size
    ]


def sweep_formulas(seed: int = SEED, count: int = RANDOM_FORMULAS) -> list:
    return list(CURATED_THEOREMS) + random_formulas(seed, count, RANDOM_DEPTH, names=ATOMS)


def _val_text(W: FinLattice, val) -> dict:
    return {p: [W.names[i] for i in bits(F.members)] for p, F in sorted(val.items())}


def _models(report: Report, max_base: int, names=ATOMS, max_size=None, modal=False):
    for W in frames(max_base, max_size):
        tally = _Tally(report, report.row(W.label(), W.size))
        for B in enumerate_stable_bimodules(W) if modal else (None,):
            for val in valuations(W, names):
                tally.instance()
                yield W, StableModel(W, val, B), tally


def suite_filtering(max_base: int) -> Report:
    """Forcing sets are filters; curated theorems hold everywhere; both disjunction clauses agree."""
    rep = Report("filtering", max_base)
    fs = sweep_formulas()
    clause_name = {"upper": "(i) upward closure", "top": "(ii) supernova", "meet-closed": "(iii) meets",
                  "non-empty": "(ii) supernova"}
    for W, M, t in _models(rep, max_base):
        ev = Forcing(M)
        for f in fs:
            S = ev.forcing_set(f)
            chk = is_filter(W, S)
            t.check(bool(chk), frame=W.label(), valuation=_val_text(W, M.valuation),
                    formula=to_text(f), law=clause_name.get(chk.clause, ""),
                    witness=[W.names[i] for i in chk.witness])
        for f in CURATED_THEOREMS:
            S = ev.forcing_set(f)
            t.check(S == W.full, frame=W.label(), valuation=_val_text(W, M.valuation),
                    formula=to_text(f), law="soundness",
                    world=W.names[bits(W.full & ~S)[0]] if S != W.full else None)
        # fan-in clause versus exact decomposition w = v1 ∧ v2
        for g, S in list(ev.memo.items()):
            if not isinstance(g, Or):
                continue
            L, R = ev.forcing_set(g.left), ev.forcing_set(g.right)
            exact = 0
            for v1 in bits(L):
                for v2 in bits(R):
                    exact |= 1 << W.meet[v1][v2]
            t.check(exact == S, frame=W.label(), valuation=_val_text(W, M.valuation),
                    formula=to_text(g), law="disjunction clause equivalence")
    return rep


def suite_stable_vs_algebraic(max_base: int) -> Report:
    """Forcing agrees pointwise with evaluation in the filter locale."""
    rep = Report("stable-vs-algebraic", max_base)
    fs = sweep_formulas()
    for W, M, t in _models(rep, max_base):
        ev = Forcing(M)
        memo: dict = {}
        for f in fs:
            S = ev.forcing_set(f)
            E = eval_filter_mask(M, f, memo=memo)
            t.check(S == E, frame=W.label(), valuation=_val_text(W, M.valuation), formula=to_text(f),
                    world=W.names[bits(S ^ E)[0]] if S != E else None)
    return rep


def suite_upset_embedding(max_base: int) -> Report:
    """Evaluation in the upset model of H equals the principal down-set of the algebraic value."""
    rep = Report("upset-embedding", max_base)
    fs = sweep_formulas()
    for H in frames(max_base):
        t = _Tally(rep, rep.row(H.label(), H.size))
        law = embedding_law_failure(H)
        t.check(not law, frame=H.label(), law=law)
        for values in product(range(H.size), repeat=len(ATOMS)):
            asg = HeytingAssignment(H, dict(zip(ATOMS, values)))
            M = build_upset_model(asg)
            t.instance()
            memo: dict = {}
            hmemo: dict = {}
            for f in fs:
                x = heyting_eval(asg, f, hmemo)
                ok = eval_filter_mask(M, f, memo=memo) == H.down[x]
                t.check(ok, frame=H.label(), assignment={p: H.names[v] for p, v in zip(ATOMS, values)},
                        formula=to_text(f))
    return rep


def suite_fragment_agreement(max_base: int) -> Report:
    """Stable and Kripke forcing coincide on the {∧, →} fragment and differ on the full language."""
    rep = Report("fragment-agreement", max_base)
    frag = [f for f in CURATED_THEOREMS if in_fragment(f)] + random_formulas(
        SEED, RANDOM_FORMULAS, RANDOM_DEPTH, names=ATOMS, fragment=True)
    full = sweep_formulas()
    disagreements = 0
    first = None
    for W, M, t in _models(rep, max_base):
        ev = Forcing(M)
        K = kripke_from_stable(M)
        kmemo: dict = {}
        for f in frag:
            S = ev.forcing_set(f)
            KS = kripke_set(K, f, kmemo)
            t.check(S == KS, frame=W.label(), valuation=_val_text(W, M.valuation), formula=to_text(f))
        for f in full:
            S = ev.forcing_set(f)
            KS = kripke_set(K, f, kmemo)
            if S != KS:
                disagreements += 1
                if first is None or len(to_text(f)) < len(first[2]):
                    first = (W.label(), _val_text(W, M.valuation), to_text(f), W.names[bits(S ^ KS)[0]])
    rep.checks += 1
    if disagreements == 0:
        rep.fail(law="full language should separate stable and Kripke forcing")
    else:
        rep.notes.append(f"{disagreements} (model, formula) pairs separate the semantics; shortest: {first}")
    # the D4 witness: p | q at the bottom world with V(p)=↑a, V(q)=↑b
    D4 = next(W for W in frames(2) if W.size == 4 and W.poset.covers and len(W.poset.covers) == 4)
    a, b = 1, 2
    M = StableModel(D4, {"p": principal_filter(D4, a), "q": principal_filter(D4, b)})
    f = parse("p | q")
    stable = Forcing(M).holds(D4.bottom, f)
    kripke = kripke_force(kripke_from_stable(M), D4.bottom, f)
    rep.checks += 1
    if not (stable and not kripke):
        rep.fail(law="D4 witness", stable=stable, kripke=kripke)
    return rep


def suite_adjunction(max_base: int) -> Report:
    """diamond_R ⊣ box_R on filters and the relation round trip, for every stable bimodule."""
    rep = Report("adjunction", max_base)
    relations = 0
    for W in frames(max_base, ADJUNCTION_MAX_SIZE):
        t = _Tally(rep, rep.row(W.label(), W.size))
        relations += len(bimodule_relations(W))
        found = stable_bimodules_by_filtering(W)
        t.check(found == enumerate_stable_bimodules(W), frame=W.label(),
                law="filtered relations equal the bimodules generated from stable maps")
        for B in found:
            t.instance()
            law = check_adjunction_on_filters(W, B.rows)
            t.check(law.ok, frame=W.label(), relation=B.pairs(), law=law.failure, witness=law.witness)
            rt = roundtrip_check(B)
            t.check(rt.ok, frame=W.label(), relation=B.pairs(), law=rt.failure, witness=rt.witness)
    rep.notes.append(f"{relations} bimodule-law relations scanned, {rep.instances} stable")
    return rep


def suite_modal_soundness(max_base: int) -> Report:
    """Unit/counit axioms, filtering and filter evaluation for modal formulas."""
    rep = Report("modal-soundness", max_base)
    fs = list(MODAL_AXIOMS) + random_formulas(SEED, 100, 3, names=("p",), modal=True)
    for W, M, t in _models(rep, max_base, names=("p",), max_size=ADJUNCTION_MAX_SIZE, modal=True):
        ev = Forcing(M)
        memo: dict = {}
        for f in MODAL_AXIOMS:
            t.check(ev.forcing_set(f) == W.full, frame=W.label(), relation=M.bimodule.pairs(),
                    formula=to_text(f), law="modal axiom")
        for f in fs:
            S = ev.forcing_set(f)
            t.check(bool(is_filter(W, S)), frame=W.label(), formula=to_text(f), law="filtering")
            t.check(S == eval_filter_mask(M, f, memo=memo), frame=W.label(), formula=to_text(f),
                    law="forcing equals filter evaluation")
    return rep


def suite_bimodule_roundtrip(max_base: int) -> Report:
    """Adjunctions on H give stable bimodules on opposite(H) whose modalities extend them."""
    rep = Report("bimodule-roundtrip", max_base)
    fs = random_formulas(SEED, 20, 3, names=("p",), modal=True)
    for H in frames(max_base, EMBEDDING_MAX_SIZE):
        t = _Tally(rep, rep.row(H.label(), H.size))
        for f in join_preserving_maps(H, H):
            t.instance()
            dia = f.table
            try:
                A = LatticeAdjunction(H, dia, right_adjoint_of(H, dia))
                B = bimodule_from_adjunction(A)
            except ValueError as e:
                t.check(False, frame=H.label(), dia=list(dia), law=str(e))
                continue
            t.check(True)
            emb = modal_embedding_check(A)
            t.check(emb.ok, frame=H.label(), dia=list(dia), law=emb.failure, witness=emb.witness)
            rt = roundtrip_check(B)
            t.check(rt.ok, frame=H.label(), dia=list(dia), law=rt.failure, witness=rt.witness)
            law = check_adjunction_on_filters(B.frame, B.rows)
            t.check(law.ok, frame=H.label(), dia=list(dia), law=law.failure)
            if H.size <= ADJUNCTION_MAX_SIZE:
                for x in range(H.size):
                    asg = HeytingAssignment(H, {"p": x}, A)
                    M = build_upset_model(asg)
                    memo: dict = {}
                    hmemo: dict = {}
                    for g in fs:
                        ok = eval_filter_mask(M, g, memo=memo) == H.down[heyting_eval(asg, g, hmemo)]
                        t.check(ok, frame=H.label(), dia=list(dia), formula=to_text(g),
                                law="modal upset embedding")
    return rep


def suite_duality(max_base: int) -> Report:
    """Every stable map is recovered from the left adjoint of its filter preimage."""
    rep = Report("duality", max_base)
    fr = frames(max_base, DUALITY_MAX_SIZE)
    for S in fr:
        t = _Tally(rep, rep.row(S.label(), S.size))
        for T in fr:
            for f in stable_maps(S, T):
                t.instance()
                stable, _ = is_stable_map(f)
                t.check(stable, source=S.label(), target=T.label(), table=list(f.table), law="stable")
                r = duality_roundtrip(f)
                t.check(r.ok and r.directed_joins_preserved, source=S.label(), target=T.label(),
                        table=list(f.table), recovered=list(r.recovered))
        coh = coherent_reconstruct(S)
        t.check(coh.ok, frame=S.label(), law=coh.failure)
    return rep


def suite_scott_extension(max_base: int) -> Report:
    """Scott extension: agrees on principals, preserves joins, has a right adjoint, is unique."""
    rep = Report("scott-extension", max_base)
    targets = frames(max_base, SCOTT_TARGET_MAX_SIZE)
    for W in frames(max_base, SCOTT_MAX_SIZE):
        t = _Tally(rep, rep.row(W.label(), W.size))
        for L in targets:
            for f in join_preserving_maps(W, L):
                t.instance()
                ext = scott_extend(f)
                D = ext.domain.lattice
                sig = ext.sigma
                where = dict(source=W.label(), target=L.label(), table=list(f.table))
                t.check(all(sig[ext.principal(w)] == f.table[w] for w in range(W.size)),
                        law="agrees on principals", **where)
                t.check(all(sig[D.join_all(bits(X))] == L.join_all(sig[i] for i in bits(X))
                            for X in range(1 << D.size)), law="preserves all joins", **where)
                t.check(all(L.leq(sig[S], y) == D.leq(S, ext.nerve[y])
                            for S in range(D.size) for y in range(L.size)), law="adjunction", **where)
                if W.size <= UNIQUENESS_MAX_SIZE and L.size <= UNIQUENESS_MAX_SIZE:
                    rivals = 0
                    for g in product(range(L.size), repeat=D.size):
                        if any(g[ext.principal(w)] != f.table[w] for w in range(W.size)):
                            continue
                        if all(g[D.join_all(bits(X))] == L.join_all(g[i] for i in bits(X))
                               for X in range(1 << D.size)):
                            rivals += 1
                    t.check(rivals == 1, law="uniqueness", extensions=rivals, **where)
    return rep


def suite_johnstone(max_base: int) -> Report:
    """Every Filt(W) is coherent and rebuilt from its compact elements."""
    rep = Report("johnstone", max_base)
    literal = 0
    for W in frames(max_base):
        t = _Tally(rep, rep.row(W.label(), W.size))
        t.instance()
        r = coherent_reconstruct(W)
        t.check(r.ok, frame=W.label(), law=r.failure)
        literal += r.iso_literal_orientation is not None
    rep.notes.append(
        "orientation: Filt(W) is isomorphic to Filt(opposite(K)) for its compacts K in every case; "
        f"the unreversed Filt(K) matches in {literal} of {rep.instances} (exactly the self-dual W)"
    )
    return rep


def suite_countermodels(max_base: int) -> Report:
    """Peirce and excluded middle refuted on the 3-chain; p -> p and bot -> p never refuted."""
    rep = Report("countermodels", max_base)
    for text in ("((p->q)->p)->p", "p | ~p"):
        first = countermodel_search(parse(text), max_base)
        again = countermodel_search(parse(text), max_base)
        rep.instances += 1
        rep.checks += 1
        W = first.model.frame if first else None
        is_chain = W is not None and W.size == 3 and all(
            W.leq(a, b) or W.leq(b, a) for a in range(3) for b in range(3))
        if not is_chain:
            rep.fail(formula=text, law="refuted on the 3-element chain")
        rep.checks += 1
        if first is None or again is None or (first.model, first.world) != (again.model, again.world):
            rep.fail(formula=text, law="deterministic search")
        elif is_chain:
            rep.notes.append(f"{text}: refuted at world {W.names[first.world]} of {W.label()}")
    for text in ("p -> p", "bot -> p"):
        rep.instances += 1
        rep.checks += 1
        found = countermodel_search(parse(text), max_base)
        if found is not None:
            rep.fail(formula=text, law="never refuted", frame=found.model.frame.label())
    return rep


def suite_parser_roundtrip(max_base: int) -> Report:
    """parse(print(f)) == f for seeded random formulas, modal connectives included."""
    from .logic import parse as _parse

    rep = Report("parser-roundtrip", max_base)
    for f in random_formulas(SEED, PARSER_SAMPLES, 6, names=("p", "q", "r1", "long_name"), modal=True):
        rep.instances += 1
        rep.checks += 1
        text = to_text(f)
        if _parse(text) != f:
            rep.fail(text=text)
    return rep


SUITES: dict[str, Callable[[int], Report]] = {
    "filtering": suite_filtering,
    "stable-vs-algebraic": suite_stable_vs_algebraic,
    "upset-embedding": suite_upset_embedding,
    "adjunction": suite_adjunction,
    "bimodule-roundtrip": suite_bimodule_roundtrip,
    "duality": suite_duality,
    "scott-extension": suite_scott_extension,
    "johnstone": suite_johnstone,
    "fragment-agreement": suite_fragment_agreement,
    "modal-soundness": suite_modal_soundness,
    "countermodels": suite_countermodels,
    "parser-roundtrip": suite_parser_roundtrip,
}


def run_suite(name: str, max_base: int) -> Report:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    start = time.perf_counter()
    rep = SUITES[name](max_base)
    rep.duration = time.perf_counter() - start
    return rep
