"""The collapse and separation checks behind ``ppboole verify-paper``.

Every check recomputes its outcome from scratch (closures, searches,
certificate verification) and reports a one-line verdict.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .boolfn import BoolFn, minor, named, threshold
from .clones import (
    GeneratorSet,
    catalog,
    catalog_entry,
    closure_at_arity,
    contains,
    dual_clone,
    idempotent_reduct_at_arity,
    verify_minor_map,
)
from .conditions import (
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
from .poset import (
    DiP,
    DiQ,
    covers,
    battery_table,
    classify_generators,
    classify_structure,
    complexity_of,
    expected_class,
    export_dot,
    leq,
    parse_dot_edges,
    separating_condition,
    shipped_battery_table,
    truncation,
)
from .ppcon import stcon_to_b2, verify_certificate
from .reduction import validate
from .structures import blocker, blocker_leq, c2, canonical, d_2sat, d_3lin2, d_hornsat, idempotence, polymorphisms_at_arity, preserves_all


@dataclass
class ClaimResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def gs(*names: str) -> GeneratorSet:
    return GeneratorSet(tuple(named(n) for n in names), "[" + ",".join(names) + "]")


def _fmt(r) -> str:
    return f"{r.status} ({r.nodes} nodes)"


# -- individual checks; each returns (ok, detail) ---------------------------------


def duality() -> tuple[bool, str]:
    bad = []
    entries = catalog(6)
    for e in entries:
        d = dual_clone(e.generators)
        if not verify_minor_map("dual-map", e.generators, d, 3):
            bad.append(e.label)
        named_dual = catalog_entry(e.dual_label, 6).generators
        if any(closure_at_arity(d, k).members != closure_at_arity(named_dual, k).members for k in (1, 2, 3)):
            bad.append(f"{e.label}: dual label {e.dual_label}")
    return not bad, f"{len(entries)} catalog clones" + (f"; failed: {bad}" if bad else "")


def top_and_bottom() -> tuple[bool, str]:
    zero = gs("0")
    results = {src.label: bool(verify_minor_map("constant-map", src, zero, 3)) for src in (gs(), gs("m"), gs("d3", "q"))}
    results["[c]->[∅]"] = bool(verify_minor_map("negation-collapse", gs("c"), gs(), 3))
    return all(results.values()), ", ".join(f"{k}: {'ok' if v else 'FAIL'}" for k, v in results.items())


def meet_join_collapse() -> tuple[bool, str]:
    cert = verify_certificate(stcon_to_b2())
    aj = gs("and", "or")
    has_d3, has_p = contains(aj, named("d3")), contains(aj, named("p"))
    return bool(cert) and has_d3 and has_p, f"certificate {'verifies' if cert else cert.problems}; d3 in [∧,∨]: {has_d3}; p in [∧,∨]: {has_p}"


def idempotent_reducts() -> tuple[bool, str]:
    ok = True
    parts = []
    for src, tgt in ((gs("m", "c"), gs("m")), (gs("d3", "c"), gs("d3", "m"))):
        mm = bool(verify_minor_map("idempotentizer", src, tgt, 3))
        eq = all(idempotent_reduct_at_arity(src, k).members == closure_at_arity(tgt, k).members for k in (1, 2, 3))
        ok &= mm and eq
        parts.append(f"{src.label}->{tgt.label}: map {mm}, reduct equality {eq}")
    return ok, "; ".join(parts)


def _sep(holds, fails) -> tuple[bool, str]:
    return bool(holds) and fails.refuted, f"{_fmt(holds)} / {_fmt(fails)}"


def atoms() -> tuple[bool, str]:
    checks = [
        (satisfies_clone(gs("d3"), quasi_majority()), satisfies_structure(d_hornsat(), quasi_majority())),
        (satisfies_clone(gs("d3"), quasi_majority()), satisfies_structure(d_3lin2(), quasi_majority())),
        (satisfies_clone(gs("and"), commutativity()), satisfies_structure(d_2sat(), commutativity())),
        (satisfies_clone(gs("and"), commutativity()), satisfies_structure(d_3lin2(), commutativity())),
        (satisfies_clone(gs("m"), quasi_minority()), satisfies_structure(d_2sat(), quasi_minority())),
        (satisfies_clone(gs("m"), quasi_minority()), satisfies_structure(d_hornsat(), quasi_minority())),
    ]
    ok = all(bool(a) and b.refuted for a, b in checks)
    return ok, f"{len(checks)} separations, all refutations exhaustive: {ok}"


def cross_refutations() -> tuple[bool, str]:
    refs = [
        satisfies_structure(d_2sat(), quasi_minority()),
        satisfies_structure(d_3lin2(), quasi_majority()),
        satisfies_structure(c2(), commutativity()),
        satisfies_structure(d_hornsat(), quasi_majority()),
    ]
    return all(r.refuted for r in refs), ", ".join(_fmt(r) for r in refs)


def at_least_two(n: int) -> BoolFn:
    return threshold(n, 2)


def chains() -> tuple[bool, str]:
    ok, parts = True, []
    for n in (3, 4, 5):
        g = at_least_two(n)
        g_ok = preserves_all(g, blocker(n - 1)) and check_witness(qnu(n), {"f": g})
        for make in (blocker, blocker_leq):
            a = satisfies_structure(make(n - 1), qnu(n))
            b = satisfies_structure(make(n), qnu(n))
            ok &= bool(a) and b.refuted
            parts.append(f"QNU({n}) {make(n).name}: {b.status}")
        ok &= g_ok
    return ok, "; ".join(parts)


HM3_Q_WITNESS = {
    "p0": lambda q: minor(q, (1, 1, 1), 3),
    "p1": lambda q: q,
    "p2": lambda q: minor(q, (3, 1, 2), 3),
    "p3": lambda q: minor(q, (3, 3, 3), 3),
}
QJ4_P_WITNESS = {
    "t0": lambda p: minor(p, (1, 1, 1), 3),
    "t1": lambda p: p,
    "t2": lambda p: minor(p, (1, 3, 3), 3),
    "t3": lambda p: minor(p, (3, 1, 2), 3),
    "t4": lambda p: minor(p, (3, 3, 3), 3),
}


def hm_and_qj() -> tuple[bool, str]:
    q, p = named("q"), named("p")
    hm_w = {k: v(q) for k, v in HM3_Q_WITNESS.items()}
    qj_w = {k: v(p) for k, v in QJ4_P_WITNESS.items()}
    hm_found = satisfies_clone(gs("q"), quasi_hagemann_mitschke(3))
    qj_found = satisfies_clone(gs("p"), quasi_jonsson(4))
    hm_bl = satisfies_structure(blocker_leq(2), quasi_hagemann_mitschke(3))
    qj_and = satisfies_clone(gs("and"), quasi_jonsson(4))
    ok = (
        check_witness(quasi_hagemann_mitschke(3), hm_w)
        and check_witness(quasi_jonsson(4), qj_w)
        and bool(hm_found) and bool(qj_found)
        and hm_found.witness == hm_w and qj_found.witness == qj_w
        and hm_bl.refuted and qj_and.refuted
    )
    return ok, f"HM(3) in [q]: {hm_found.status}; in blocker_leq(2): {hm_bl.status}; QJ(4) in [p]: {qj_found.status}; in [∧]: {qj_and.status}"


def coatom() -> tuple[bool, str]:
    A = idempotence()
    r = satisfies_structure(A, constancy())
    no_const = all(
        not any(f.table in (0, f.mask) for f in polymorphisms_at_arity(A, k)) for k in (1, 2)
    )
    s = satisfies_clone(gs("0"), constancy())
    return r.refuted and no_const and bool(s), f"Pol(idempotence): {_fmt(r)}; [0]: {s.status}"


STRUCTURE_CLASSES = {
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
GENERATOR_CLASSES = {"p": ("P", "NL-complete"), "q": ("Q", "L"), "": ("Bottom", "NP-complete"), "0": ("Top", "L")}


def classification() -> tuple[bool, str]:
    bad = []
    for name, (cls, cx) in STRUCTURE_CLASSES.items():
        r = classify_structure(canonical(name))
        if (str(r.cls), r.complexity) != (cls, cx):
            bad.append(f"{name}: {r.cls}")
    for spec, (cls, cx) in GENERATOR_CLASSES.items():
        r = classify_generators(GeneratorSet.parse(spec), 6)
        if (str(r.cls), r.complexity) != (cls, cx):
            bad.append(f"[{spec}]: {r.cls}")
    n = len(STRUCTURE_CLASSES) + len(GENERATOR_CLASSES)
    return not bad, f"{n} inputs" + (f"; wrong: {bad}" if bad else "")


def class_inventory() -> tuple[bool, str]:
    shipped = shipped_battery_table()
    fresh = battery_table(shipped["chain_bound"])
    bad = [lab for lab, row in fresh["rows"].items() if shipped["rows"].get(lab) != row]
    bad += [lab for lab, row in fresh["rows"].items() if row["class"] != str(expected_class(lab))]
    return not bad, f"{len(fresh['rows'])} catalog rows regenerated" + (f"; mismatched: {bad}" if bad else "")


def reduction(seed: int = 0) -> tuple[bool, str]:
    rep = validate(stcon_to_b2(), 100, seed)
    return rep.ok, f"{rep.agreements}/{rep.instances} agree, {rep.transported}/{rep.satisfiable} transported (seed {seed})"


def lattice_shape(depth: int = 6) -> tuple[bool, str]:
    dot = export_dot(depth)
    edges = parse_dot_edges(dot)
    atoms_ = {b for a, b in edges if a == "Bottom"}
    coatoms = {a for a, b in edges if b == "Top"}
    chain_ok = all(
        leq(make(i + 1), make(i)) and not leq(make(i), make(i + 1))
        for make in (DiP, DiQ)
        for i in range(3, depth)
    )
    seps = [separating_condition(b, a) for a, b in covers(depth)]
    live = all(s.verified for s in seps)
    ok = len(atoms_) == 3 and len(coatoms) == 1 and chain_ok and live
    return ok, f"atoms {sorted(atoms_)}, coatoms {sorted(coatoms)}, {len(seps)} cover separations verified: {live}"


def incomparabilities(depth: int = 6) -> tuple[bool, str]:
    nodes = truncation(depth)
    bad, count = [], 0
    for a in nodes:
        for b in nodes:
            if not leq(a, b):
                count += 1
                if not separating_condition(a, b).verified:
                    bad.append(f"{a}/{b}")
    return not bad, f"{count} non-inequalities each witnessed by a refuted condition" + (f"; failed {bad}" if bad else "")


def quasi_minority_breaks_b2() -> tuple[bool, str]:
    from .structures import ZERO, blocker_relation, preserves

    qm = quasi_minority()
    tables = [BoolFn(3, t) for t in range(256) if check_witness(qm, {"f": BoolFn(3, t)})]
    keep = [f for f in tables if preserves(f, blocker_relation(2))]
    # the constant 1 is a quasi minority operation preserving B2, but not {0}
    ok = keep == [BoolFn(3, 255)] and not preserves(keep[0], ZERO)
    return ok, f"{len(tables)} ternary quasi minority operations; only the constant 1 preserves B2"


def complexity_labels() -> tuple[bool, str]:
    expected = {
        "Bottom": "NP-complete", "Meet": "P-complete", "M": "⊕L-complete", "D3": "NL-complete",
        "P": "NL-complete", "DiP(5)": "NL-complete", "D3M": "L", "Q": "L", "DiQ(4)": "L", "MQ": "L",
    }
    from .poset import PosetClass

    bad = [k for k, v in expected.items() if complexity_of(PosetClass.parse(k)) != v]
    return not bad, "labels match" if not bad else f"wrong: {bad}"


CLAIMS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("duality collapse", duality),
    ("top and bottom", top_and_bottom),
    ("[∨,∧] ≡ [d3,p]", meet_join_collapse),
    ("idempotent reducts", idempotent_reducts),
    ("atoms pairwise incomparable", atoms),
    ("cross refutations", cross_refutations),
    ("quasi minority breaks B2", quasi_minority_breaks_b2),
    ("QNU chain separations", chains),
    ("HM(3) and QJ(4) separations", hm_and_qj),
    ("coatom", coatom),
    ("classification of canonical inputs", classification),
    ("complexity labels", complexity_labels),
    ("class inventory / battery table", class_inventory),
    ("reduction validation", reduction),
    ("lattice shape", lattice_shape),
    ("incomparabilities", incomparabilities),
]


def run_all(only: str | None = None) -> list[ClaimResult]:
    out = []
    for name, fn in CLAIMS:
        if only and only.lower() not in name.lower():
            continue
        t = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed claim, reported not raised
            ok, detail = False, f"error: {exc!r}"
        out.append(ClaimResult(name, ok, detail, time.perf_counter() - t))
    return out
