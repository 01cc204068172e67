from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppboole.conditions import (
    commutativity,
    constancy,
    qnu,
    quasi_hagemann_mitschke,
    quasi_jonsson,
    quasi_minority,
    satisfies_structure,
)
from ppboole.ppcon import (
    PpCertificate,
    PpFormula,
    PpPower,
    build_power,
    dump_certificate,
    eval_pp,
    find_homomorphism,
    hom_equivalent,
    identity_certificate,
    is_homomorphism,
    parse_certificate,
    parse_formula,
    shipped_certificate,
    stcon_to_b2,
    verify_certificate,
)
from ppboole.structures import Relation, Structure, blocker_leq, canonical, d_stcon

BUILTINS4 = [constancy(), commutativity(), quasi_minority(), qnu(3), qnu(4), quasi_jonsson(4), quasi_hagemann_mitschke(3)]


def bruteforce_eval(A, phi):
    out = set()
    for val in product(A.domain, repeat=phi.nvars):
        if all(val[a] == val[b] for a, b in phi.equalities) and all(
            tuple(val[v] for v in args) in A.relation(r).tuples for r, args in phi.atoms
        ):
            out.add(val[: phi.free_vars])
    return out


@st.composite
def formulas(draw, A):
    free = draw(st.integers(1, 3))
    ex = draw(st.integers(0, 2))
    n = free + ex
    rels = list(A.relations)
    atoms = []
    for _ in range(draw(st.integers(0, 4))):
        r = draw(st.sampled_from(rels))
        atoms.append((r.name, tuple(draw(st.integers(0, n - 1)) for _ in range(r.arity))))
    eqs = [tuple(draw(st.integers(0, n - 1)) for _ in range(2)) for _ in range(draw(st.integers(0, 2)))]
    return PpFormula(free, ex, tuple(atoms), tuple(eqs))


@settings(max_examples=150, deadline=None)
@given(st.data(), st.sampled_from(["D_2SAT", "D_STCON", "C2", "blocker(2)", "D_HORNSAT"]))
def test_eval_matches_bruteforce(data, name):
    A = canonical(name)
    phi = data.draw(formulas(A))
    assert eval_pp(A, phi).tuples == bruteforce_eval(A, phi)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_eval_monotone_in_relations(data):
    A = canonical("D_STCON")
    phi = data.draw(formulas(A))
    # enlarge every relation by random extra tuples
    bigger = []
    for r in A.relations:
        extra = data.draw(st.sets(st.tuples(*[st.sampled_from((0, 1))] * r.arity), max_size=2))
        bigger.append(Relation(r.name, r.arity, set(r.tuples) | extra))
    B = Structure("bigger", tuple(bigger))
    assert eval_pp(A, phi).tuples <= eval_pp(B, phi).tuples


def test_parse_formula_sugar():
    A = d_stcon()
    phi = parse_formula("LEQ(x,y) & x=0 & y=z", ["x", "y"], A)
    assert phi.free_vars == 2 and phi.existential_vars == 1
    assert ("ZERO", (0,)) in phi.atoms
    assert eval_pp(A, phi).tuples == {(0, 0), (0, 1)}
    assert phi.render() == "LEQ(x,y) & ZERO(x) & y=z"


def test_parse_formula_errors():
    with pytest.raises(ValueError, match="not expressible"):
        parse_formula("x=1", ["x"], canonical("D_2SAT"))
    with pytest.raises(KeyError):
        parse_formula("NOPE(x)", ["x"], d_stcon())
    with pytest.raises(ValueError):
        parse_formula("LEQ(x)", ["x"], d_stcon())
    with pytest.raises(ValueError):
        parse_formula("LEQ(x,y", ["x", "y"], d_stcon())


def test_power_dimension_checked():
    with pytest.raises(ValueError):
        PpPower(d_stcon(), 5, ())
    with pytest.raises(ValueError):
        PpPower(d_stcon(), 2, (("R", 1, PpFormula(1, 0, ())),))


def test_shipped_certificate_verifies():
    c = stcon_to_b2()
    assert verify_certificate(c)
    power = build_power(c.power)
    assert len(power.domain) == 4
    assert hom_equivalent(power, c.target)
    assert shipped_certificate("stcon_to_b2").target == blocker_leq(2)


def test_corrupted_certificate_reports_violation():
    c = stcon_to_b2()
    bad = dict(c.hom_to_target)
    bad[(0, 0)] = 0
    report = verify_certificate(PpCertificate(c.source, c.target, c.power, bad, c.hom_from_target))
    assert not report
    assert any("B2" in p for p in report.problems)


def test_wrong_target_signature():
    c = stcon_to_b2()
    report = verify_certificate(PpCertificate(c.source, canonical("D_STCON"), c.power, c.hom_to_target, c.hom_from_target))
    assert not report and "target has" in report.problems[0]


@pytest.mark.parametrize("name", ["D_2SAT", "C2", "blocker_leq(2)"])
def test_identity_certificate(name):
    assert verify_certificate(identity_certificate(canonical(name)))


def test_dump_parse_round_trip():
    c = stcon_to_b2()
    text = dump_certificate(c, "D_STCON", "blocker_leq(2)")
    again = parse_certificate(text)
    assert again.power == c.power
    assert again.hom_to_target == c.hom_to_target and again.hom_from_target == c.hom_from_target
    assert verify_certificate(again)


def test_certificate_parse_errors():
    with pytest.raises(ValueError, match="lacks"):
        parse_certificate("source: D_STCON\n")
    with pytest.raises(ValueError, match="cannot parse"):
        parse_certificate("what is this\n")


def test_homomorphism_composition_stays_in_target():
    c = stcon_to_b2()
    power = build_power(c.power)
    for r in c.target.relations:
        for t in r.tuples:
            mid = tuple(c.hom_from_target[x] for x in t)
            assert mid in power.relation(r.name).tuples
            assert tuple(c.hom_to_target[x] for x in mid) in r.tuples


def bruteforce_hom(A, B):
    for img in product(B.domain, repeat=len(A.domain)):
        h = dict(zip(A.domain, img))
        if is_homomorphism(h, A, B):
            return True
    return False


@pytest.mark.parametrize("a", ["D_2SAT", "C2", "blocker(2)", "idempotence", "D_STCON"])
@pytest.mark.parametrize("b", ["D_2SAT", "C2", "blocker(2)", "idempotence", "D_STCON"])
def test_find_homomorphism_matches_bruteforce(a, b):
    A, B = canonical(a), canonical(b)
    if A.signature() != B.signature():
        with pytest.raises(ValueError):
            find_homomorphism(A, B)
        return
    h = find_homomorphism(A, B)
    assert (h is not None) == bruteforce_hom(A, B)
    if h is not None:
        assert is_homomorphism(h, A, B)


def test_c2_has_no_homomorphism_to_idempotent_constant():
    loop = Structure("loop", (Relation("ZERO", 1, [(0,)]), Relation("ONE", 1, [(1,)]), Relation("NEQ", 2, [(0, 0)])))
    assert find_homomorphism(canonical("C2"), loop) is None


@pytest.mark.parametrize("cond", BUILTINS4, ids=str)
def test_certificate_soundness(cond):
    # conditions satisfied by Pol(source) are satisfied by Pol(target)
    c = stcon_to_b2()
    if satisfies_structure(c.source, cond):
        assert satisfies_structure(c.target, cond)


@st.composite
def digraphs(draw):
    n = draw(st.integers(1, 3))
    dom = tuple(range(n))
    edges = draw(st.sets(st.tuples(st.sampled_from(dom), st.sampled_from(dom)), max_size=6))
    marks = draw(st.sets(st.tuples(st.sampled_from(dom)), max_size=2))
    return Structure("G", (Relation("E", 2, edges), Relation("U", 1, marks)), dom)


@settings(max_examples=200, deadline=None)
@given(digraphs(), digraphs())
def test_find_homomorphism_random(A, B):
    h = find_homomorphism(A, B)
    assert (h is not None) == bruteforce_hom(A, B)
    if h is not None:
        assert is_homomorphism(h, A, B)
