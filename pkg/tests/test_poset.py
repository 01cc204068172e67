from itertools import product

import pytest

from ppboole.clones import catalog, contains, dual_clone
from ppboole.poset import (
    BOTTOM,
    D3,
    D3M,
    M,
    MEET,
    MQ,
    P,
    Q,
    TOP,
    DiP,
    DiQ,
    PosetClass,
    class_info,
    classify_generators,
    classify_structure,
    compare,
    complexity_of,
    covers,
    decide,
    expected_class,
    export_dot,
    leq,
    parse_dot_edges,
    representative,
    separating_condition,
    truncation,
)
from ppboole.structures import canonical

from conftest import gs
from test_structures import POL_GENERATORS


@pytest.mark.parametrize("depth", [3, 5, 8])
def test_leq_is_partial_order(depth):
    nodes = truncation(depth)
    for a in nodes:
        assert leq(a, a)
    for a, b in product(nodes, repeat=2):
        if a != b:
            assert not (leq(a, b) and leq(b, a))
    for a, b, c in product(nodes, repeat=3):
        if leq(a, b) and leq(b, c):
            assert leq(a, c)


def test_order_facts():
    assert all(leq(BOTTOM, c) and leq(c, TOP) for c in truncation(6))
    assert leq(MEET, P) and leq(P, Q) and leq(P, DiP(7)) and leq(Q, DiQ(7))
    assert leq(DiP(5), DiP(3)) and leq(DiQ(5), DiQ(4)) and leq(DiP(5), DiQ(5))
    assert not leq(DiQ(3), DiP(3)) and not leq(Q, DiP(9))
    assert leq(D3, DiP(3)) and leq(M, D3M) and leq(D3M, MQ)
    assert not leq(MEET, D3) and not leq(M, MEET) and not leq(TOP, MQ)
    assert compare(MEET, D3) == "incomparable"
    assert compare(P, Q) == "⪯" and compare(Q, P) == "⪰" and compare(M, M) == "≡"


def test_class_names():
    assert str(DiP(4)) == "DiP(4)"
    assert PosetClass.parse("diq(5)") == DiQ(5)
    assert PosetClass.parse("Meet") == MEET
    with pytest.raises(ValueError):
        PosetClass("DiP")
    with pytest.raises(ValueError):
        PosetClass("DiP", 2)
    with pytest.raises(ValueError):
        PosetClass("Nope")


def test_hasse_shape_depth6():
    cov = covers(6)
    assert len(cov) == 23
    assert sorted(str(b) for a, b in cov if a == BOTTOM) == ["D3", "M", "Meet"]
    assert [str(a) for a, b in cov if b == TOP] == ["MQ"]
    for i in range(3, 6):
        assert (DiP(i + 1), DiP(i)) in cov and (DiQ(i + 1), DiQ(i)) in cov


def test_dot_export():
    dot = export_dot(6)
    edges = parse_dot_edges(dot)
    assert ("P", "DiP(>6)") in edges and ("DiP(>6)", "DiP(6)") in edges
    assert ("Bottom", "Meet") in edges and ("MQ", "Top") in edges
    solid = [e for e in edges if ">" not in e[0] + e[1]]
    assert len(solid) == 23 - 2
    assert dot == export_dot(6)


def test_complexity_labels():
    expected = {BOTTOM: "NP-complete", MEET: "P-complete", M: "⊕L-complete", D3: "NL-complete", DiP(4): "NL-complete", P: "NL-complete", D3M: "L", DiQ(3): "L", Q: "L", MQ: "L", TOP: "L"}
    for c, label in expected.items():
        assert complexity_of(c) == label


def test_decide_table():
    base = {"Const": False, "Comm": False, "quasi-minority": False, "QNU(3)": False, "QNU(4)": False, "QJ(4)": False, "HM(3)": False}
    assert decide(base, 4) == BOTTOM
    assert decide({**base, "Const": True}, 4) == TOP
    assert decide({**base, "quasi-minority": True}, 4) == M
    assert decide({**base, "Comm": True}, 4) == MEET
    assert decide({**base, "Comm": True, "QJ(4)": True}, 4) == P
    assert decide({**base, "Comm": True, "QJ(4)": True, "HM(3)": True}, 4) == Q
    assert decide({**base, "Comm": True, "QJ(4)": True}, 4, allow_limits=False) is None
    assert decide({**base, "Comm": True, "QNU(4)": True, "QJ(4)": True, "HM(3)": True}, 4) == DiQ(4)
    assert decide({**base, "Comm": True, "QNU(3)": True, "quasi-minority": True}, 4) == MQ


CATALOG6 = catalog(6)


@pytest.mark.parametrize("entry", CATALOG6, ids=lambda e: e.label)
def test_classify_matches_inventory(entry):
    assert classify_generators(entry.generators, 6).cls == expected_class(entry.label)


@pytest.mark.parametrize("entry", CATALOG6, ids=lambda e: e.label)
def test_dual_invariance(entry):
    assert classify_generators(dual_clone(entry.generators), 6).cls == classify_generators(entry.generators, 6).cls


def _order_respected(entries):
    classes = {e.label: expected_class(e.label) for e in entries}
    for a in entries:
        for b in entries:
            if all(contains(b.generators, g) for g in a.generators):
                assert leq(classes[a.label], classes[b.label]), (a.label, b.label)


def test_classification_respects_inclusion():
    _order_respected(catalog(4))


@pytest.mark.slow
def test_classification_respects_inclusion_depth6():
    _order_respected(CATALOG6)


@pytest.mark.parametrize("name", sorted(POL_GENERATORS))
def test_structure_matches_generators(name):
    assert classify_structure(canonical(name)).cls == classify_generators(gs(*POL_GENERATORS[name])).cls


def test_generator_bound_is_raised():
    res = classify_generators(gs("d7", "q"), 4)
    assert res.cls == DiQ(7) and res.chain_bound == 7 and res.notes
    with pytest.raises(ValueError):
        classify_generators(gs("p"), 3)


def test_structure_notes():
    res = classify_structure(canonical("D_HORNSAT"))
    assert res.cls == MEET and any("assumption" in n for n in res.notes)
    assert res.to_dict()["class"] == "Meet"


@pytest.mark.parametrize("a, b", covers(6), ids=lambda c: str(c))
def test_cover_separations(a, b):
    sep = separating_condition(b, a)
    assert sep.verified


def test_separation_requires_non_inequality():
    with pytest.raises(ValueError):
        separating_condition(MEET, P)


def test_representatives_classify_to_themselves():
    for c in truncation(5):
        assert classify_generators(representative(c), 5).cls == c


def test_class_info():
    info = class_info(M)
    assert "[m]" in info.members and "[m,c]" in info.members
    assert info.complexity == "⊕L-complete"
