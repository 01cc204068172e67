"""Acceptance criteria 1-13, exact outcomes.  Each test carries a
``criterion`` marker; the terminal summary prints one PASS/FAIL line per
criterion."""

import time

import pytest

from ppboole.boolfn import minor, named, threshold
from ppboole.clones import (
    catalog,
    closure_at_arity,
    contains,
    dual_clone,
    idempotent_reduct_at_arity,
    verify_minor_map,
)
from ppboole.conditions import (
    check_witness,
    commutativity,
    constancy,
    qnu,
    quasi_hagemann_mitschke,
    quasi_jonsson,
    quasi_majority,
    quasi_minority,
    satisfies_clone,
    satisfies_structure,
)
from ppboole.poset import (
    DiP,
    DiQ,
    PosetClass,
    classify_generators,
    classify_structure,
    covers,
    battery_table,
    export_dot,
    parse_dot_edges,
    separating_condition,
    shipped_battery_table,
    truncation,
)
from ppboole.ppcon import stcon_to_b2, verify_certificate
from ppboole.reduction import validate
from ppboole.structures import (
    blocker,
    blocker_leq,
    c2,
    canonical,
    d_2sat,
    d_3lin2,
    d_hornsat,
    idempotence,
    polymorphisms_at_arity,
    preserves_all,
)

from conftest import gs


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


@pytest.mark.criterion(1, "duality collapse: dual-map verifies for every catalog clone, < 5 s")
def test_duality_collapse():
    entries = catalog()
    with Timer() as t:
        for e in entries:
            rep = verify_minor_map("dual-map", e.generators, dual_clone(e.generators), 3)
            assert rep, (e.label, rep.failure)
    assert t.seconds < 5


@pytest.mark.criterion(2, "top and bottom: constant-map from [∅], [m], [d3,q]; negation-collapse [c] -> [∅]")
def test_top_and_bottom():
    for src in (gs(), gs("m"), gs("d3", "q")):
        assert verify_minor_map("constant-map", src, gs("0"), 3), src.label
    assert verify_minor_map("negation-collapse", gs("c"), gs(), 3)


@pytest.mark.criterion(3, "[∨,∧] ≡ [d3,p]: certificate verifies, d3 and p in [∨,∧]")
def test_meet_join_collapse():
    assert verify_certificate(stcon_to_b2())
    aj = gs("or", "and")
    assert contains(aj, named("d3")) and contains(aj, named("p"))
    assert closure_at_arity(aj, 3).members >= closure_at_arity(gs("d3", "p"), 3).members


@pytest.mark.criterion(4, "idempotent reducts: [m,c]->[m], [d3,c]->[d3,m] maps and slice equalities")
def test_idempotent_reducts():
    for src, tgt in ((gs("m", "c"), gs("m")), (gs("d3", "c"), gs("d3", "m"))):
        assert verify_minor_map("idempotentizer", src, tgt, 3)
        for k in (1, 2, 3):
            assert idempotent_reduct_at_arity(src, k).members == closure_at_arity(tgt, k).members


@pytest.mark.criterion(5, "atoms pairwise incomparable: six exhaustive separations, < 1 s each")
def test_atoms():
    checks = [
        (gs("d3"), d_hornsat(), quasi_majority()),
        (gs("d3"), d_3lin2(), quasi_majority()),
        (gs("and"), d_2sat(), commutativity()),
        (gs("and"), d_3lin2(), commutativity()),
        (gs("m"), d_2sat(), quasi_minority()),
        (gs("m"), d_hornsat(), quasi_minority()),
    ]
    for G, A, cond in checks:
        with Timer() as t:
            yes = satisfies_clone(G, cond)
            no = satisfies_structure(A, cond)
        assert yes and check_witness(cond, yes.witness)
        assert no.refuted, (A.name, cond.name)
        assert t.seconds < 1


@pytest.mark.criterion(6, "cross refutations: quasi minority, quasi majority, Comm, quasi majority refuted exhaustively")
def test_cross_refutations():
    for A, cond in ((d_2sat(), quasi_minority()), (d_3lin2(), quasi_majority()), (c2(), commutativity()), (d_hornsat(), quasi_majority())):
        assert satisfies_structure(A, cond).refuted, (A.name, cond.name)


@pytest.mark.criterion(7, "chain separations: QNU(n) for n = 3,4,5 on blocker and blocker_leq, < 60 s")
def test_chain_separations():
    with Timer() as t:
        for n in (3, 4, 5):
            g = threshold(n, 2)
            assert check_witness(qnu(n), {"f": g})
            for make in (blocker, blocker_leq):
                assert preserves_all(g, make(n - 1))
                assert satisfies_structure(make(n - 1), qnu(n)), (make(n - 1).name, n)
                assert satisfies_structure(make(n), qnu(n)).refuted, (make(n).name, n)
    assert t.seconds < 60


HM3_Q = {"p0": ((1, 1, 1), 3), "p1": ((1, 2, 3), 3), "p2": ((3, 1, 2), 3), "p3": ((3, 3, 3), 3)}


@pytest.mark.criterion(8, "HM(3) and QJ(4): witnesses in [q] and [p]; refuted in Pol(blocker_leq(2)) and [∧]")
def test_hm_and_qj():
    q = named("q")
    explicit = {s: minor(q, img, r) for s, (img, r) in HM3_Q.items()}
    assert check_witness(quasi_hagemann_mitschke(3), explicit)
    hm = satisfies_clone(gs("q"), quasi_hagemann_mitschke(3))
    assert hm and check_witness(quasi_hagemann_mitschke(3), hm.witness)
    assert hm.witness == explicit
    assert satisfies_structure(blocker_leq(2), quasi_hagemann_mitschke(3)).refuted
    qj = satisfies_clone(gs("p"), quasi_jonsson(4))
    assert qj and check_witness(quasi_jonsson(4), qj.witness)
    assert satisfies_clone(gs("and"), quasi_jonsson(4), route="explicit").refuted


@pytest.mark.criterion(9, "coatom: Const refuted in Pol(idempotence), satisfied in [0]")
def test_coatom():
    A = idempotence()
    for k in (1, 2):
        assert not any(f.table in (0, f.mask) for f in polymorphisms_at_arity(A, k))
    assert satisfies_structure(A, constancy()).refuted
    assert satisfies_clone(gs("0"), constancy())


STRUCTURES = {
    "D_HORNSAT": ("Meet", "P-complete"),
    "D_3LIN2": ("M", "⊕L-complete"),
    "D_2SAT": ("D3", "NL-complete"),
    "C2": ("D3M", "L"),
    "idempotence": ("MQ", "L"),
    "blocker(2)": ("DiQ(3)", "L"),
    "blocker_leq(2)": ("DiP(3)", "NL-complete"),
    "blocker(3)": ("DiQ(4)", "L"),
    "blocker_leq(3)": ("DiP(4)", "NL-complete"),
}
GENERATORS = {("p",): ("P", "NL-complete"), ("q",): ("Q", "L"), (): ("Bottom", "NP-complete"), ("0",): ("Top", "L")}


@pytest.mark.criterion(10, "classification of the canonical structures and generator inputs")
def test_classification():
    for name, (cls, cx) in STRUCTURES.items():
        res = classify_structure(canonical(name))
        assert (str(res.cls), res.complexity) == (cls, cx), name
    for names, (cls, cx) in GENERATORS.items():
        res = classify_generators(gs(*names))
        assert (str(res.cls), res.complexity) == (cls, cx), names


@pytest.mark.criterion(11, "decision table regenerated by exhaustive search equals the shipped table")
def test_battery_table():
    shipped = shipped_battery_table()
    fresh = battery_table(shipped["chain_bound"])
    assert fresh["rows"].keys() == shipped["rows"].keys()
    for label, row in fresh["rows"].items():
        assert row == shipped["rows"][label], label
    assert len(fresh["rows"]) == len(catalog(shipped["chain_bound"]))


@pytest.mark.criterion(12, "reduction: 100 seeded instances, full agreement and transport, < 10 s")
def test_reduction_validation():
    with Timer() as t:
        rep = validate(stcon_to_b2(), 100, seed=0, max_variables=8)
    assert rep.instances == rep.agreements == 100
    assert rep.transported == rep.satisfiable and not rep.failures
    assert t.seconds < 10


@pytest.mark.criterion(13, "lattice shape at depth 6: 3 atoms, 1 coatom, strict chains, live cover separations, < 30 s")
def test_lattice_shape():
    with Timer() as t:
        dot = export_dot(6)
        edges = parse_dot_edges(dot)
        cov = covers(6)
        # the DOT file carries exactly the covers, with the P/Q tails routed through markers
        solid = {(a, b) for a, b in edges if ">" not in a + b}
        marked = {(a, b) for a, b in edges if ">" in b}
        assert solid | {(a, m.replace(">6", "6")) for a, m in marked} == {(str(a), str(b)) for a, b in cov}
        bottom, top = PosetClass("Bottom"), PosetClass("Top")
        assert sorted(str(b) for a, b in cov if a == bottom) == ["D3", "M", "Meet"]
        assert [str(a) for a, b in cov if b == top] == ["MQ"]
        for i in range(3, 6):
            assert (DiP(i + 1), DiP(i)) in cov and (DiQ(i + 1), DiQ(i)) in cov
            assert classify_generators(gs(f"d{i + 1}", "p")).cls != classify_generators(gs(f"d{i}", "p")).cls
        for a, b in cov:
            assert separating_condition(b, a).verified, (a, b)
        assert len(truncation(6)) == 17
    assert t.seconds < 30
