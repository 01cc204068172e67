"""The lattice of pp-constructability classes of Boolean structures.

Classes are decided through a battery of height-1 conditions: two clones
are pp-constructible from one another exactly when they satisfy the same
height-1 conditions, and a short battery already tells all classes apart.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

from .clones import DEFAULT_CHAIN_BOUND, GeneratorSet, catalog
from .conditions import (
    H1Condition,
    SatResult,
    commutativity,
    constancy,
    qnu,
    quasi_hagemann_mitschke,
    quasi_jonsson,
    quasi_minority,
    satisfies_clone,
    satisfies_structure,
)
from .structures import Structure

TAGS = ("Bottom", "Meet", "D3", "M", "D3M", "P", "Q", "DiP", "DiQ", "MQ", "Top")
CHAIN_TAGS = ("DiP", "DiQ")


@dataclass(frozen=True)
class PosetClass:
    tag: str
    chain_index: int | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown class tag {self.tag!r}")
        if (self.tag in CHAIN_TAGS) != (self.chain_index is not None):
            raise ValueError(f"{self.tag}: chain index is required exactly for DiP/DiQ")
        if self.chain_index is not None and self.chain_index < 3:
            raise ValueError("chain index starts at 3")

    def __str__(self) -> str:
        return f"{self.tag}({self.chain_index})" if self.chain_index is not None else self.tag

    @classmethod
    def parse(cls, text: str) -> "PosetClass":
        m = re.fullmatch(r"\s*(\w+)\s*(?:\(\s*(\d+)\s*\))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse class {text!r}")
        tag = m.group(1)
        for t in TAGS:
            if t.lower() == tag.lower():
                tag = t
        return cls(tag, int(m.group(2)) if m.group(2) else None)


BOTTOM, MEET, D3, M, D3M, P, Q, MQ, TOP = (
    PosetClass(t) for t in ("Bottom", "Meet", "D3", "M", "D3M", "P", "Q", "MQ", "Top")
)


def DiP(i: int) -> PosetClass:
    return PosetClass("DiP", i)


def DiQ(i: int) -> PosetClass:
    return PosetClass("DiQ", i)


# strict upper sets for the classes without chain index (MQ and Top are
# handled uniformly below)
_ABOVE = {
    "Meet": {"P", "Q", "DiP", "DiQ"},
    "P": {"Q", "DiP", "DiQ"},
    "Q": {"DiQ"},
    "D3": {"D3M"},
    "M": {"D3M"},
    "D3M": set(),
}


def leq(a: PosetClass, b: PosetClass) -> bool:
    """Is ``a`` below ``b``?  Bottom is below everything, Top above everything."""
    if a == b or a.tag == "Bottom" or b.tag == "Top":
        return True
    if a.tag == "Top":
        return False
    if b.tag == "MQ":
        return True
    if a.tag == "MQ" or b.tag == "Bottom":
        return False
    if a.tag == "DiP":
        return b.tag in CHAIN_TAGS and b.chain_index <= a.chain_index
    if a.tag == "DiQ":
        return b.tag == "DiQ" and b.chain_index <= a.chain_index
    if a.tag == "D3" and b.tag in CHAIN_TAGS:
        return b.chain_index == 3
    return b.tag in _ABOVE[a.tag]


def compare(a: PosetClass, b: PosetClass) -> str:
    ab, ba = leq(a, b), leq(b, a)
    if ab and ba:
        return "≡"
    if ab:
        return "⪯"
    if ba:
        return "⪰"
    return "incomparable"


def truncation(depth: int) -> list[PosetClass]:
    if depth < 3:
        raise ValueError("chain depth must be at least 3")
    out = [BOTTOM, MEET, D3, M, D3M, P, Q]
    out += [DiP(i) for i in range(3, depth + 1)]
    out += [DiQ(i) for i in range(3, depth + 1)]
    return out + [MQ, TOP]


def covers(depth: int) -> list[tuple[PosetClass, PosetClass]]:
    """Cover pairs (lower, upper) of the truncation at ``depth``."""
    nodes = truncation(depth)
    out = []
    for a in nodes:
        for b in nodes:
            if a == b or not leq(a, b):
                continue
            if any(c not in (a, b) and leq(a, c) and leq(c, b) for c in nodes):
                continue
            out.append((a, b))
    return out


# -- complexity -------------------------------------------------------------------

COMPLEXITY = {
    "Bottom": "NP-complete",
    "Meet": "P-complete",
    "M": "⊕L-complete",
    "D3": "NL-complete",
    "P": "NL-complete",
    "DiP": "NL-complete",
    "D3M": "L",
    "Q": "L",
    "DiQ": "L",
    "MQ": "L",
    "Top": "L",
}


def complexity_of(c: PosetClass) -> str:
    return COMPLEXITY[c.tag]


def complexity_note(c: PosetClass) -> str | None:
    if c.tag == "Top":
        return "trivially satisfiable: a constant polymorphism exists (in L, inferred from D3M below Top)"
    return None


# -- DOT export ---------------------------------------------------------------------


def export_dot(chain_depth: int = 6) -> str:
    """Hasse diagram truncated at ``chain_depth``; the infinite chain tails
    below DiP/DiQ(depth) are drawn as dashed edges through marker nodes."""
    lines = ["digraph lattice {", "  rankdir=BT;", "  node [shape=box];"]
    for c in truncation(chain_depth):
        lines.append(f'  "{c}" [label="{c}", complexity="{complexity_of(c)}"];')
    for tail, head in (("P", "DiP"), ("Q", "DiQ")):
        marker = f"{head}(>{chain_depth})"
        lines.append(f'  "{marker}" [label="...", shape=plaintext, elided=true];')
    for a, b in covers(chain_depth):
        if a.tag in ("P", "Q") and b.tag in CHAIN_TAGS and b.chain_index == chain_depth:
            marker = f"{b.tag}(>{chain_depth})"
            lines.append(f'  "{a}" -> "{marker}" [style=dashed];')
            lines.append(f'  "{marker}" -> "{b}" [style=dashed];')
        else:
            lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_dot_edges(dot: str) -> list[tuple[str, str]]:
    return re.findall(r'"([^"]+)"\s*->\s*"([^"]+)"', dot)


# -- the battery --------------------------------------------------------------------


def battery(chain_bound: int) -> list[H1Condition]:
    if chain_bound < 3:
        raise ValueError("chain bound must be at least 3")
    conds = [constancy(), commutativity(), quasi_minority()]
    conds += [qnu(k) for k in range(3, chain_bound + 1)]
    return conds + [quasi_jonsson(4), quasi_hagemann_mitschke(3)]


@dataclass
class Classification:
    cls: PosetClass | None
    outcomes: dict[str, SatResult]
    chain_bound: int
    notes: list[str] = field(default_factory=list)

    @property
    def complexity(self) -> str | None:
        return complexity_of(self.cls) if self.cls else None

    def row(self) -> dict[str, bool]:
        return {name: bool(r) for name, r in self.outcomes.items()}

    def to_dict(self) -> dict:
        return {
            "class": str(self.cls) if self.cls else "unresolved",
            "complexity": self.complexity,
            "chain_bound": self.chain_bound,
            "battery": {n: r.status for n, r in self.outcomes.items()},
            "nodes": {n: r.nodes for n, r in self.outcomes.items()},
            "witnesses": {
                n: {s: str(f) for s, f in r.witness.items()}
                for n, r in self.outcomes.items()
                if r.witness
            },
            "notes": self.notes,
        }


def decide(row: dict[str, bool], chain_bound: int, allow_limits: bool = True) -> PosetClass | None:
    """Resolve battery outcomes (condition name -> satisfied) to a class."""
    if row["Const"]:
        return TOP
    qmin, qnu3, comm = row["quasi-minority"], row["QNU(3)"], row["Comm"]
    hm3 = row["HM(3)"]
    if qmin and qnu3:
        return MQ if comm else D3M
    if qmin:
        return M
    if qnu3:
        return (DiQ(3) if hm3 else DiP(3)) if comm else D3
    if not comm:
        return BOTTOM
    for k in range(4, chain_bound + 1):
        if row[f"QNU({k})"]:
            return DiQ(k) if hm3 else DiP(k)
    if row["QJ(4)"]:
        return (Q if hm3 else P) if allow_limits else None
    return MEET


def _run_battery(check: Callable[[H1Condition], SatResult], chain_bound: int) -> dict[str, SatResult]:
    out = {}
    for cond in battery(chain_bound):
        r = check(cond)
        if not r and not r.exhaustive:
            raise RuntimeError(f"search for {cond.name} stopped before completion")
        out[cond.name] = r
    return out


def classify_generators(G: GeneratorSet | Iterable, chain_bound: int = 6) -> Classification:
    """Class of the clone generated by ``G``.

    The QNU chain is searched up to ``max(chain_bound, largest generator
    arity)``: a clone generated by operations of arity at most ``a`` that
    has a QNU operation at all has one of arity at most ``a``.
    """
    if not isinstance(G, GeneratorSet):
        G = GeneratorSet(tuple(G))
    if chain_bound < 4:
        raise ValueError("chain bound must be at least 4")
    bound = max(chain_bound, G.max_arity)
    outcomes = _run_battery(lambda c: satisfies_clone(G, c), bound)
    result = Classification(decide({n: bool(r) for n, r in outcomes.items()}, bound), outcomes, bound)
    if bound > chain_bound:
        result.notes.append(f"chain bound raised to generator arity {bound}")
    return result


def classify_structure(A: Structure) -> Classification:
    """Class of Pol(A); the QNU chain is cut at the largest relation arity + 1.

    Finite structures are never placed in the limit classes P or Q; a
    battery pointing there is reported as unresolved.
    """
    bound = max(A.max_arity + 1, 4)
    outcomes = _run_battery(lambda c: satisfies_structure(A, c), bound)
    row = {n: bool(r) for n, r in outcomes.items()}
    cls = decide(row, bound, allow_limits=False)
    result = Classification(cls, outcomes, bound)
    if row["Comm"] and not row["QNU(3)"] and not row["quasi-minority"]:
        result.notes.append(
            f"assumption: no QNU operation beyond arity {bound} (relation arity + 1)"
        )
    if cls is None:
        result.notes.append(f"unresolved: no QNU(k) for k <= {bound}")
    return result


# -- class inventory -------------------------------------------------------------------


def representative(c: PosetClass) -> GeneratorSet:
    names = {
        "Bottom": (), "Meet": ("and",), "D3": ("d3",), "M": ("m",), "D3M": ("d3", "m"),
        "P": ("p",), "Q": ("q",), "MQ": ("m", "q"), "Top": ("0",),
    }
    from .boolfn import named

    if c.tag == "DiP":
        gens = (f"d{c.chain_index}", "p")
    elif c.tag == "DiQ":
        gens = (f"d{c.chain_index}", "q")
    else:
        gens = names[c.tag]
    return GeneratorSet(tuple(named(g) for g in gens), "[" + ",".join(gens) + "]" if gens else "[∅]")


CANONICAL_STRUCTURES = {
    "Bottom": None, "Meet": "D_HORNSAT", "D3": "D_2SAT", "M": "D_3LIN2", "D3M": "C2",
    "P": None, "Q": None, "MQ": "idempotence", "Top": None,
}


def canonical_structure_of(c: PosetClass) -> str | None:
    if c.tag == "DiP":
        return f"blocker_leq({c.chain_index - 1})"
    if c.tag == "DiQ":
        return f"blocker({c.chain_index - 1})"
    return CANONICAL_STRUCTURES[c.tag]


def expected_class(label: str) -> PosetClass:
    """Class of a catalog label according to the class inventory."""
    fixed = {
        "[∅]": BOTTOM, "[c]": BOTTOM, "[0]": TOP, "[1]": TOP, "[∧]": MEET, "[∨]": MEET,
        "[m]": M, "[m,c]": M, "[d3]": D3, "[d3,m]": D3M, "[d3,c]": D3M,
        "[p]": P, "[p^Δ]": P, "[q]": Q, "[q^Δ]": Q, "[∧,∨]": DiP(3),
        "[∨,q]": MQ, "[∧,q^Δ]": MQ, "[m,q]": MQ, "[m,q^Δ]": MQ, "[all idempotent]": MQ,
    }
    if label in fixed:
        return fixed[label]
    m = re.fullmatch(r"\[d(\d+)(\^Δ)?(?:,([pq])(\^Δ)?)?\]", label)
    if not m:
        raise KeyError(f"no inventory entry for {label!r}")
    i = int(m.group(1))
    if m.group(3) == "q":
        return DiQ(i)
    if m.group(3) is None and i == 3:
        return D3
    return DiP(i)


@dataclass(frozen=True)
class ClassInfo:
    cls: PosetClass
    members: tuple[str, ...]
    canonical_structure: str | None
    complexity: str


def class_info(c: PosetClass, chain_bound: int = DEFAULT_CHAIN_BOUND) -> ClassInfo:
    members = tuple(e.label for e in catalog(max(chain_bound, 3)) if expected_class(e.label) == c)
    return ClassInfo(c, members, canonical_structure_of(c), complexity_of(c))


# -- separations ---------------------------------------------------------------------


@dataclass
class Separation:
    condition: H1Condition
    holds: SatResult
    fails: SatResult

    @property
    def verified(self) -> bool:
        return bool(self.holds) and self.fails.refuted


def separation_order(max_index: int) -> list[H1Condition]:
    conds = [constancy(), qnu(3), commutativity(), quasi_minority()]
    conds += [qnu(k) for k in range(4, max_index + 1)]
    return conds + [quasi_hagemann_mitschke(3), quasi_jonsson(4)]


def separating_condition(a: PosetClass, b: PosetClass) -> Separation:
    """A height-1 condition true in class ``a`` and false in class ``b``.

    Both outcomes are recomputed by search on the class representatives.
    """
    if leq(a, b):
        raise ValueError(f"{a} lies below {b}; no condition separates them")
    ra, rb = representative(a), representative(b)
    top = max(a.chain_index or 3, b.chain_index or 3) + 1
    for cond in separation_order(top):
        yes = satisfies_clone(ra, cond)
        if not yes:
            continue
        no = satisfies_clone(rb, cond)
        if not no and no.exhaustive:
            return Separation(cond, yes, no)
    raise RuntimeError(f"no battery condition separates {a} from {b}")


# -- shipped decision table --------------------------------------------------------

BATTERY_TABLE = Path(__file__).with_name("data") / "battery_table.json"


def battery_table(chain_bound: int = DEFAULT_CHAIN_BOUND) -> dict:
    """Battery outcomes for every catalog clone, as shipped in the data file."""
    rows = {}
    for e in catalog(chain_bound):
        res = classify_generators(e.generators, max(chain_bound, 4))
        rows[e.label] = {"class": str(res.cls), "battery": res.row()}
    return {"chain_bound": chain_bound, "rows": rows}


def write_battery_table(path: str | Path = BATTERY_TABLE, chain_bound: int = DEFAULT_CHAIN_BOUND) -> dict:
    table = battery_table(chain_bound)
    Path(path).write_text(json.dumps(table, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    return table


@lru_cache(maxsize=1)
def shipped_battery_table() -> dict:
    return json.loads(BATTERY_TABLE.read_text(encoding="utf-8"))
