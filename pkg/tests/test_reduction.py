import json
import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppboole.ppcon import identity_certificate, stcon_to_b2
from ppboole.reduction import (
    CspInstance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    random_instance,
    reduce_instance,
    satisfies,
    solve_bruteforce,
    transport,
    validate,
)
from ppboole.structures import blocker_leq, canonical

B2 = blocker_leq(2)


def bruteforce_sat(I, A):
    return any(satisfies(v, I, A) for v in product(A.domain, repeat=I.variables))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["blocker_leq(2)", "D_2SAT", "D_STCON", "C2"]))
def test_solver_matches_enumeration(seed, name):
    A = canonical(name)
    I = random_instance(A, random.Random(seed), 6, 8)
    sol = solve_bruteforce(I, A)
    assert (sol is not None) == bruteforce_sat(I, A)
    if sol is not None:
        assert satisfies(sol, I, A)


def test_reduction_example():
    I = CspInstance(B2.signature(), 2, (("B2", (0, 1)),))
    red = reduce_instance(I, stcon_to_b2())
    assert red.instance.variables == 4
    assert red.instance.constraints == (("LEQ", (1, 2)),)
    assert red.variable_map == [(0, 1), (2, 3)]
    assert not red.unsat_marker


def test_contradiction_is_flagged():
    cert = stcon_to_b2()
    I = CspInstance(B2.signature(), 1, (("ZERO", (0,)), ("ONE", (0,))))
    red = reduce_instance(I, cert)
    assert red.unsat_marker and red.notes
    assert solve_bruteforce(red.instance, cert.source) is None
    assert solve_bruteforce(I, B2) is None


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_equisatisfiable_and_transport(seed):
    cert = stcon_to_b2()
    I = random_instance(B2, random.Random(seed), 8, 10)
    red = reduce_instance(I, cert, check=False)
    a, b = solve_bruteforce(I, B2), solve_bruteforce(red.instance, cert.source)
    assert (a is None) == (b is None)
    if b is not None:
        assert satisfies(transport(b, red, cert), I, B2)


def test_reduction_size_is_linear():
    cert = stcon_to_b2()
    rng = random.Random(3)
    for _ in range(50):
        I = random_instance(B2, rng, 8, 10)
        red = reduce_instance(I, cert, check=False)
        # every target variable becomes 2 source variables; every constraint at most 2 atoms
        assert red.instance.variables <= 2 * I.variables
        assert len(red.instance) <= 2 * len(I)


def test_validate_report():
    rep = validate(stcon_to_b2(), 100, seed=0)
    assert rep.ok and rep.instances == 100 and rep.agreements == 100
    assert rep.transported == rep.satisfiable > 0
    assert rep.to_dict()["ok"] is True
    assert validate(stcon_to_b2(), 100, seed=0).to_dict() == rep.to_dict()


def test_identity_certificate_reduction():
    A = canonical("D_2SAT")
    rep = validate(identity_certificate(A), 30, seed=1)
    assert rep.ok


def test_instance_validation():
    with pytest.raises(ValueError):
        CspInstance(B2.signature(), 2, (("NOPE", (0,)),))
    with pytest.raises(ValueError):
        CspInstance(B2.signature(), 2, (("B2", (0,)),))
    with pytest.raises(ValueError):
        CspInstance(B2.signature(), 2, (("B2", (0, 2)),))
    with pytest.raises(ValueError):
        reduce_instance(CspInstance({"E": 2}, 1, ()), stcon_to_b2())


def test_instance_json_round_trip(tmp_path):
    I = CspInstance(B2.signature(), 3, (("B2", (0, 1)), ("LEQ", (1, 2)), ("ZERO", (2,))))
    data = instance_to_dict(I, "blocker_leq(2)")
    assert data["constraints"][0] == ["B2", [1, 2]]
    path = tmp_path / "i.json"
    path.write_text(json.dumps(data))
    J, A = load_instance(path)
    assert J == I and A == B2
    inline = instance_to_dict(I, B2)
    assert instance_from_dict(inline) == (I, B2)
