"""Finite relational structures and polymorphism search.

Boolean structures have domain ``(0, 1)``.  The same classes carry structures
over other finite domains (pp-powers live on ``{0,1}^n``), which only the
homomorphism code in :mod:`ppboole.ppcon` needs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Any, Hashable, Iterable, Sequence

from .boolfn import BoolFn, index_of, point
from .search import CellSearch

BOOL = (0, 1)

# above this many row selections a relation is not compiled into table constraints
MAX_SELECTIONS = 3_000_000


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    tuples: frozenset

    def __init__(self, name: str, arity: int, tuples: Iterable[Sequence[Hashable]]):
        ts = frozenset(tuple(t) for t in tuples)
        for t in ts:
            if len(t) != arity:
                raise ValueError(f"relation {name}: tuple {t} does not have arity {arity}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "tuples", ts)

    def __len__(self) -> int:
        return len(self.tuples)

    def __contains__(self, t) -> bool:
        return tuple(t) in self.tuples

    def sorted_tuples(self) -> list[tuple]:
        return sorted(self.tuples)

    def renamed(self, name: str) -> "Relation":
        return Relation(name, self.arity, self.tuples)

    def complement_tuples(self) -> "Relation":
        """Apply Boolean negation to every coordinate of every tuple."""
        return Relation(self.name, self.arity, (tuple(1 - x for x in t) for t in self.tuples))

    def missing_tuple(self) -> tuple[int, ...] | None:
        """For ``{0,1}^r`` minus exactly one tuple, that tuple."""
        if len(self.tuples) != (1 << self.arity) - 1:
            return None
        if not all(x in BOOL for t in self.tuples for x in t):
            return None
        for t in product(BOOL, repeat=self.arity):
            if t not in self.tuples:
                return t
        return None


@dataclass(frozen=True)
class Structure:
    name: str
    relations: tuple[Relation, ...]
    domain: tuple = BOOL

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "domain", tuple(self.domain))
        names = [r.name for r in self.relations]
        if len(set(names)) != len(names):
            raise ValueError(f"structure {self.name}: duplicate relation names")
        dom = set(self.domain)
        for r in self.relations:
            for t in r.tuples:
                if not set(t) <= dom:
                    raise ValueError(f"relation {r.name} uses elements outside the domain")

    def relation(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(f"structure {self.name} has no relation {name!r}")

    def signature(self) -> dict[str, int]:
        return {r.name: r.arity for r in self.relations}

    @property
    def max_arity(self) -> int:
        return max((r.arity for r in self.relations), default=0)

    def is_boolean(self) -> bool:
        return set(self.domain) <= set(BOOL)

    def dual(self) -> "Structure":
        return Structure(self.name + "^D", tuple(r.complement_tuples() for r in self.relations))


# -- preservation -------------------------------------------------------------


def preserves(f: BoolFn, rel: Relation) -> bool:
    """Does ``f`` applied coordinatewise map ``rel``^arity into ``rel``?"""
    n = f.arity
    missing = rel.missing_tuple()
    if missing is not None and rel.arity >= 2:
        return not _cover_violation(f, missing)
    tuples = rel.sorted_tuples()
    if len(tuples) ** n > MAX_SELECTIONS:
        raise ValueError(f"relation {rel.name} too large for brute-force preservation at arity {n}")
    for cols in product(tuples, repeat=n):
        out = tuple(
            (f.table >> index_of([c[j] for c in cols])) & 1 for j in range(rel.arity)
        )
        if out not in rel.tuples:
            return False
    return True


def _cover_violation(f: BoolFn, missing: tuple[int, ...]) -> bool:
    # rows x^j with f(x^j) = missing_j whose columns all differ from `missing`
    n = f.arity
    full = (1 << n) - 1
    pools = [set(), set()]
    for q in range(1 << n):
        v = (f.table >> q) & 1
        pools[v].add(q ^ (full if v else 0))
    reach = {0}
    for v in missing:
        if not pools[v]:
            return False
        reach = {u | s for u in reach for s in pools[v]}
    return full in reach


def preserves_all(f: BoolFn, structure: Structure) -> bool:
    return all(preserves(f, r) for r in structure.relations)


def relation_constraints(rel: Relation, n: int):
    """Constraints on the cells of an ``n``-ary table expressing preservation.

    Yields ``("cover", missing)`` for co-singleton relations of arity >= 3 and
    ``("table", points, allowed)`` otherwise, one per selection of ``n``
    columns from the relation (rows of that matrix are the table points).
    """
    if len(rel.tuples) == 1 << rel.arity:
        return
    missing = rel.missing_tuple()
    if missing is not None and rel.arity >= 3:
        yield ("cover", missing)
        return
    tuples = rel.sorted_tuples()
    if len(tuples) ** n > MAX_SELECTIONS:
        raise ValueError(f"relation {rel.name}: {len(tuples)}^{n} selections exceeds search limits")
    allowed = rel.tuples
    seen = set()
    for cols in product(tuples, repeat=n):
        pts = tuple(index_of([c[j] for c in cols]) for j in range(rel.arity))
        if pts in seen:
            continue
        seen.add(pts)
        yield ("table", pts, allowed)


def add_structure_constraints(search: CellSearch, symbol: int, structure: Structure) -> None:
    n = search.arities[symbol]
    for rel in structure.relations:
        for con in relation_constraints(rel, n):
            if con[0] == "cover":
                search.add_cover(symbol, con[1])
            else:
                search.add_table([search.cell(symbol, p) for p in con[1]], con[2])


def polymorphisms_at_arity(structure: Structure, k: int):
    """All ``k``-ary polymorphisms, as a :class:`~ppboole.clones.CloneSlice`."""
    from .clones import CloneSlice

    if k < 1:
        raise ValueError("arity must be positive")
    if not structure.is_boolean():
        raise ValueError("polymorphism search is implemented for Boolean structures")
    search = CellSearch([k])
    add_structure_constraints(search, 0, structure)
    out = search.solve(limit=None)
    return CloneSlice(k, frozenset(BoolFn(k, t[0]) for t in out.solutions))


# -- canonical structures ---------------------------------------------------


def _all_tuples(r: int) -> list[tuple[int, ...]]:
    return list(product(BOOL, repeat=r))


def co_singleton(name: str, missing: Sequence[int]) -> Relation:
    missing = tuple(missing)
    return Relation(name, len(missing), (t for t in _all_tuples(len(missing)) if t != missing))


ZERO = Relation("ZERO", 1, [(0,)])
ONE = Relation("ONE", 1, [(1,)])
LEQ = Relation("LEQ", 2, [(0, 0), (0, 1), (1, 1)])
NEQ = Relation("NEQ", 2, [(0, 1), (1, 0)])


def blocker_relation(k: int) -> Relation:
    """B_k = {0,1}^k minus the all-zero tuple."""
    if k < 1:
        raise ValueError("blocker arity must be positive")
    return co_singleton(f"B{k}", (0,) * k)


def affine_relation(a: int, b: int, c: int, d: int) -> Relation:
    return Relation(
        f"R{a}{b}{c}{d}",
        3,
        (t for t in _all_tuples(3) if (a * t[0] + b * t[1] + c * t[2]) % 2 == d),
    )


def d_2sat() -> Structure:
    return Structure(
        "D_2SAT", tuple(co_singleton(f"R{a}{b}", (a, b)) for a, b in _all_tuples(2))
    )


def d_hornsat() -> Structure:
    return Structure(
        "D_HORNSAT", (co_singleton("R110", (1, 1, 0)), co_singleton("R111", (1, 1, 1)), ZERO, ONE)
    )


def d_3lin2() -> Structure:
    rels, seen = [], set()
    for a, b, c, d in product(BOOL, repeat=4):
        if (a, b, c) == (0, 0, 0):
            continue
        r = affine_relation(a, b, c, d)
        if r.tuples not in seen:
            seen.add(r.tuples)
            rels.append(r)
    return Structure("D_3LIN2", tuple(rels))


def d_stcon() -> Structure:
    return Structure("D_STCON", (ZERO, ONE, LEQ))


def b2_structure() -> Structure:
    return Structure("B2", (ZERO, ONE, blocker_relation(2)))


def c2() -> Structure:
    return Structure("C2", (ZERO, ONE, NEQ))


def blocker(k: int) -> Structure:
    if k < 2:
        raise ValueError("blockers are defined for k >= 2")
    return Structure(f"blocker({k})", (ZERO, ONE, blocker_relation(k)))


def blocker_leq(k: int) -> Structure:
    if k < 2:
        raise ValueError("blockers are defined for k >= 2")
    return Structure(f"blocker_leq({k})", (ZERO, ONE, blocker_relation(k), LEQ))


def idempotence() -> Structure:
    return Structure("idempotence", (ZERO, ONE))


_CANONICAL = {
    "d_2sat": d_2sat,
    "2sat": d_2sat,
    "d_hornsat": d_hornsat,
    "hornsat": d_hornsat,
    "d_3lin2": d_3lin2,
    "3lin2": d_3lin2,
    "d_stcon": d_stcon,
    "stcon": d_stcon,
    "b2": b2_structure,
    "b2-structure": b2_structure,
    "c2": c2,
    "idempotence": idempotence,
    "idempotence-structure": idempotence,
}


def canonical(name: str) -> Structure:
    """Canonical structures by name, e.g. ``D_HORNSAT``, ``blocker(3)``, ``blocker_leq(2)``."""
    key = name.strip().lower().replace("𝔻_", "d_")
    if m := re.fullmatch(r"(blocker|blocker_leq)\s*\(\s*(\d+)\s*\)", key):
        return (blocker if m.group(1) == "blocker" else blocker_leq)(int(m.group(2)))
    if key in _CANONICAL:
        return _CANONICAL[key]()
    raise KeyError(f"unknown canonical structure {name!r}")


CANONICAL_NAMES = (
    "D_2SAT", "D_HORNSAT", "D_3LIN2", "D_STCON", "B2", "C2", "idempotence",
    "blocker(k)", "blocker_leq(k)",
)


# -- file format ----------------------------------------------------------------


def structure_to_dict(s: Structure) -> dict[str, Any]:
    if not s.is_boolean():
        raise ValueError("only Boolean structures have a file format")
    return {
        "name": s.name,
        "relations": [
            {
                "name": r.name,
                "arity": r.arity,
                "tuples": ["".join(map(str, t)) for t in r.sorted_tuples()],
            }
            for r in s.relations
        ],
    }


def structure_from_dict(data: dict[str, Any]) -> Structure:
    rels = []
    for rd in data["relations"]:
        arity = int(rd["arity"])
        tuples = []
        for t in rd["tuples"]:
            if isinstance(t, str):
                if not re.fullmatch(r"[01]*", t):
                    raise ValueError(f"relation {rd['name']}: bad tuple {t!r}")
                tuples.append(tuple(int(ch) for ch in t))
            else:
                tuples.append(tuple(int(x) for x in t))
        rels.append(Relation(rd["name"], arity, tuples))
    return Structure(data.get("name", "structure"), tuple(rels))


SHIPPED = Path(__file__).with_name("data") / "structures"


def load_structure(path: str | Path) -> Structure:
    """Read a structure file (also looked up among the shipped ones), or resolve a canonical name."""
    p = Path(path)
    if not p.exists() and (SHIPPED / p.name).exists():
        p = SHIPPED / p.name
    if p.exists():
        return structure_from_dict(json.loads(p.read_text(encoding="utf-8")))
    return canonical(str(path))


def dump_structure(s: Structure, path: str | Path) -> None:
    Path(path).write_text(json.dumps(structure_to_dict(s), indent=2) + "\n", encoding="utf-8")


def points(n: int) -> list[tuple[int, ...]]:
    return [point(a, n) for a in range(1 << n)]
