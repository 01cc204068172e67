"""Height-1 conditions and the search deciding whether a clone satisfies one.

A condition is a list of identities ``f(x_pi(1), ..., x_pi(n)) = g(x_s(1), ...)``.
Identities never nest symbols and never equate a symbol with a bare
variable.  The text form is one identity per line; a line may chain several
terms (``f(x,y,y) = f(y,x,y) = f(x,x,x)``), which stands for the identities
between consecutive terms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .boolfn import BoolFn, IndexMap, minor
from .clones import (
    GeneratorSet,
    add_description_constraints,
    description,
    explicit_slice,
)
from .search import CellSearch
from .structures import Structure, add_structure_constraints


class ConditionSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    symbol: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Identity:
    left: Term
    right: Term

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.left.args + self.right.args))

    @property
    def arity(self) -> int:
        return len(self.variables)

    def index_maps(self) -> tuple[IndexMap, IndexMap]:
        pos = {v: i + 1 for i, v in enumerate(self.variables)}
        r = self.arity
        return (
            IndexMap(r, tuple(pos[v] for v in self.left.args)),
            IndexMap(r, tuple(pos[v] for v in self.right.args)),
        )


@dataclass(frozen=True)
class H1Condition:
    name: str
    symbols: tuple[tuple[str, int], ...]
    identities: tuple[Identity, ...]

    def __post_init__(self):
        arity = dict(self.symbols)
        if len(arity) != len(self.symbols):
            raise ConditionSyntaxError("duplicate symbol declaration")
        for ident in self.identities:
            for t in (ident.left, ident.right):
                if t.symbol not in arity:
                    raise ConditionSyntaxError(f"undeclared symbol {t.symbol!r}")
                if arity[t.symbol] != len(t.args):
                    raise ConditionSyntaxError(
                        f"symbol {t.symbol!r} used with {len(t.args)} arguments, declared {arity[t.symbol]}"
                    )

    def arity(self, symbol: str) -> int:
        return dict(self.symbols)[symbol]

    @property
    def max_arity(self) -> int:
        return max((n for _, n in self.symbols), default=0)

    def render(self) -> str:
        return "\n".join(f"{_render_term(i.left)} = {_render_term(i.right)}" for i in self.identities)

    def __str__(self) -> str:
        return self.name


def _render_term(t: Term) -> str:
    return f"{t.symbol}({','.join(t.args)})"


# -- parsing ---------------------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_']*"
_TERM = re.compile(rf"^\s*({_IDENT})\s*\((.*)\)\s*$")


def _parse_term(text: str, lineno: int) -> Term:
    m = _TERM.match(text)
    if not m:
        if re.fullmatch(rf"\s*{_IDENT}\s*", text):
            raise ConditionSyntaxError(
                f"line {lineno}: bare variable {text.strip()!r} as one side of an identity"
            )
        raise ConditionSyntaxError(f"line {lineno}: cannot parse term {text.strip()!r}")
    symbol, inner = m.group(1), m.group(2)
    if "(" in inner or ")" in inner:
        raise ConditionSyntaxError(f"line {lineno}: nested terms are not height 1: {text.strip()!r}")
    args = tuple(a.strip() for a in inner.split(",")) if inner.strip() else ()
    if not args:
        raise ConditionSyntaxError(f"line {lineno}: symbol {symbol!r} applied to no variables")
    for a in args:
        if not re.fullmatch(_IDENT, a):
            raise ConditionSyntaxError(f"line {lineno}: bad variable {a!r}")
    return Term(symbol, args)


def parse_condition(text: str, name: str = "condition") -> H1Condition:
    """Parse the identity DSL, e.g. ``f(x,y) = f(y,x)``; ``≈`` also works."""
    symbols: dict[str, int] = {}
    identities: list[Identity] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = re.split(r"≈|==|=", line)
        if len(parts) < 2:
            raise ConditionSyntaxError(f"line {lineno}: expected an identity 'lhs = rhs'")
        terms = [_parse_term(p, lineno) for p in parts]
        for t in terms:
            known = symbols.setdefault(t.symbol, len(t.args))
            if known != len(t.args):
                raise ConditionSyntaxError(
                    f"line {lineno}: symbol {t.symbol!r} has arity {known} elsewhere, {len(t.args)} here"
                )
        identities += [Identity(a, b) for a, b in zip(terms, terms[1:])]
    if not identities:
        raise ConditionSyntaxError("no identities")
    return H1Condition(name, tuple(symbols.items()), tuple(identities))


# -- builtin families ------------------------------------------------------------


def _chain(symbol_terms: list[Term]) -> list[Identity]:
    return [Identity(a, b) for a, b in zip(symbol_terms, symbol_terms[1:])]


def qnu(k: int) -> H1Condition:
    if k < 3:
        raise ValueError("QNU(k) needs k >= 3")
    terms = [Term("f", tuple("y" if j == i else "x" for j in range(k))) for i in range(k)]
    terms.append(Term("f", ("x",) * k))
    return H1Condition(f"QNU({k})", (("f", k),), tuple(_chain(terms)))


def quasi_majority() -> H1Condition:
    c = qnu(3)
    return H1Condition("quasi-majority", c.symbols, c.identities)


def quasi_minority() -> H1Condition:
    terms = [Term("f", a) for a in (("x", "y", "y"), ("y", "x", "y"), ("y", "y", "x"), ("x", "x", "x"))]
    return H1Condition("quasi-minority", (("f", 3),), tuple(_chain(terms)))


def commutativity() -> H1Condition:
    return H1Condition("Comm", (("f", 2),), (Identity(Term("f", ("x", "y")), Term("f", ("y", "x"))),))


def constancy() -> H1Condition:
    return H1Condition("Const", (("f", 1),), (Identity(Term("f", ("x",)), Term("f", ("y",))),))


def quasi_jonsson(n: int) -> H1Condition:
    if n < 1:
        raise ValueError("QJ(n) needs n >= 1")
    t = [f"t{i}" for i in range(n + 1)]
    ids = [
        Identity(Term(t[0], ("x", "y", "z")), Term(t[0], ("x", "x", "x"))),
        Identity(Term(t[n], ("x", "y", "z")), Term(t[n], ("z", "z", "z"))),
    ]
    ids += [Identity(Term(s, ("x", "y", "x")), Term(s, ("x", "x", "x"))) for s in t]
    for i in range(n):
        args = ("x", "x", "z") if i % 2 == 0 else ("x", "z", "z")
        ids.append(Identity(Term(t[i], args), Term(t[i + 1], args)))
    return H1Condition(f"QJ({n})", tuple((s, 3) for s in t), tuple(ids))


def quasi_hagemann_mitschke(n: int) -> H1Condition:
    if n < 1:
        raise ValueError("HM(n) needs n >= 1")
    p = [f"p{i}" for i in range(n + 1)]
    ids = [
        Identity(Term(p[0], ("x", "y", "z")), Term(p[0], ("x", "x", "x"))),
        Identity(Term(p[n], ("x", "y", "z")), Term(p[n], ("z", "z", "z"))),
    ]
    ids += [Identity(Term(p[i], ("x", "x", "y")), Term(p[i + 1], ("x", "y", "y"))) for i in range(n)]
    return H1Condition(f"HM({n})", tuple((s, 3) for s in p), tuple(ids))


def builtin(family: str, parameter: int | None = None) -> H1Condition:
    fam = family.lower().replace("_", "-")
    if fam == "qnu":
        return qnu(_need(parameter, family))
    if fam in ("qj", "quasi-jonsson"):
        return quasi_jonsson(_need(parameter, family))
    if fam in ("hm", "quasi-hagemann-mitschke"):
        return quasi_hagemann_mitschke(_need(parameter, family))
    if fam in ("qmaj", "quasi-majority", "qmajority"):
        return quasi_majority()
    if fam in ("qmin", "qminor", "qminority", "quasi-minority"):
        return quasi_minority()
    if fam in ("comm", "commutativity"):
        return commutativity()
    if fam in ("const", "constancy"):
        return constancy()
    raise KeyError(f"unknown condition family {family!r}")


def _need(parameter, family):
    if parameter is None:
        raise ValueError(f"{family} needs a numeric parameter")
    return int(parameter)


BUILTIN_NAMES = ("qnu:K", "qj:N", "hm:N", "qmaj", "qminor", "comm", "const")


def condition_by_name(name: str) -> H1Condition:
    """Builtin by CLI name (``qnu:4``, ``hm:3``, ``comm`` ...) or a DSL file path."""
    m = re.fullmatch(r"\s*([A-Za-z_-]+)\s*(?:[:(]\s*(\d+)\s*\)?)?\s*", name)
    if m:
        try:
            return builtin(m.group(1), m.group(2))
        except KeyError:
            pass
    p = Path(name)
    if p.exists():
        return parse_condition(p.read_text(encoding="utf-8"), p.stem)
    raise KeyError(f"unknown condition {name!r}; builtins: {', '.join(BUILTIN_NAMES)}")


# -- satisfaction ----------------------------------------------------------------


@dataclass
class SatResult:
    condition: str
    witness: dict[str, BoolFn] | None
    nodes: int
    exhaustive: bool
    route: str = ""

    def __bool__(self) -> bool:
        return self.witness is not None

    @property
    def refuted(self) -> bool:
        return self.witness is None and self.exhaustive

    @property
    def status(self) -> str:
        if self.witness is not None:
            return "satisfied"
        return "refuted" if self.exhaustive else "unknown"


def check_witness(cond: H1Condition, assignment: Mapping[str, BoolFn]) -> bool:
    for sym, n in cond.symbols:
        if sym not in assignment or assignment[sym].arity != n:
            return False
    for ident in cond.identities:
        pl, pr = ident.index_maps()
        if minor(assignment[ident.left.symbol], pl) != minor(assignment[ident.right.symbol], pr):
            return False
    return True


def _compile(cond: H1Condition) -> tuple[CellSearch, dict[str, int]]:
    index = {s: i for i, (s, _) in enumerate(cond.symbols)}
    search = CellSearch([n for _, n in cond.symbols])
    for ident in cond.identities:
        pl, pr = ident.index_maps()
        r = ident.arity
        sl, sr = index[ident.left.symbol], index[ident.right.symbol]
        for a in range(1 << r):
            bits = [(a >> (r - v)) & 1 for v in range(1, r + 1)]
            il = _point_index(bits, pl.image)
            ir = _point_index(bits, pr.image)
            search.merge(search.cell(sl, il), search.cell(sr, ir))
    return search, index


def _point_index(bits: list[int], image: tuple[int, ...]) -> int:
    i = 0
    for v in image:
        i = (i << 1) | bits[v - 1]
    return i


def _finish(cond, search, max_nodes, route) -> SatResult:
    out = search.solve(limit=1, max_nodes=max_nodes)
    if out.solutions:
        sol = out.solutions[0]
        witness = {s: BoolFn(n, sol[i]) for i, (s, n) in enumerate(cond.symbols)}
        return SatResult(cond.name, witness, out.nodes, False, route)
    return SatResult(cond.name, None, out.nodes, out.exhaustive, route)


# arities up to this use the explicit closure as the symbol domain
EXPLICIT_ROUTE_MAX_ARITY = 3


def satisfies_clone(
    G: GeneratorSet | Iterable[BoolFn],
    cond: H1Condition,
    route: str = "auto",
    max_nodes: int | None = None,
) -> SatResult:
    """Search the clone generated by ``G`` for a witness of ``cond``.

    ``route`` is ``explicit`` (symbols range over the closure at their
    arity), ``description`` (symbols constrained by the relations the
    generators preserve) or ``auto``, which uses the closure for arities up
    to 3 and the relational form above that.
    """
    if not isinstance(G, GeneratorSet):
        G = GeneratorSet(tuple(G))
    if route == "auto":
        route = "explicit" if cond.max_arity <= EXPLICIT_ROUTE_MAX_ARITY else "description"
    search, index = _compile(cond)
    if route == "explicit":
        for sym, n in cond.symbols:
            sl = explicit_slice(G, n)
            if sl is None:
                raise ValueError(f"closure at arity {n} is too large for the explicit route")
            cells = [search.cell(index[sym], p) for p in range(1 << n)]
            search.add_table(cells, [f.bits() for f in sl])
    elif route == "description":
        desc = description(G)
        for sym, _ in cond.symbols:
            add_description_constraints(search, index[sym], desc)
    else:
        raise ValueError(f"unknown route {route!r}")
    return _finish(cond, search, max_nodes, route)


def satisfies_structure(A: Structure, cond: H1Condition, max_nodes: int | None = None) -> SatResult:
    """Search Pol(A) for a witness of ``cond``."""
    if not A.is_boolean():
        raise ValueError("condition search is implemented for Boolean structures")
    search, index = _compile(cond)
    for sym, _ in cond.symbols:
        add_structure_constraints(search, index[sym], A)
    return _finish(cond, search, max_nodes, "structure")
