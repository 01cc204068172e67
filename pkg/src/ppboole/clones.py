"""Clones on {0,1} given by generators.

Two independent views of a clone are kept apart on purpose:

* :func:`closure_at_arity` superposes the generators over the ``k``-ary
  members, starting from projections, until a fixpoint -- the direct
  definition;
* :func:`description` lists which relations of a fixed family
  (``{0}``, ``{1}``, ``<=``, ``!=``, the 4-ary parity relation, the Horn
  relation ``R110`` and its dual, the blockers ``B_k`` and their duals) are
  preserved by every generator.  The clone is the set of operations
  preserving the same relations; this is what lets membership and
  condition search run at arities where the explicit slice has hundreds
  of thousands of members.  Tests compare both views wherever the
  closure is computable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .boolfn import (
    BoolFn,
    all_index_maps,
    compose,
    constant,
    dual,
    is_constant,
    is_idempotent,
    minor,
    named,
    negate,
    parse_generators,
    projections,
)
from .search import CellSearch
from .structures import (
    LEQ,
    NEQ,
    ONE,
    ZERO,
    Relation,
    blocker_relation,
    co_singleton,
    preserves,
)

# work budget (array cells touched) for one generator application in the closure
CLOSURE_BUDGET = 400_000_000


class CloneTooLarge(RuntimeError):
    """The explicit slice exceeds the configured budget."""


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple[BoolFn, ...]
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(sorted(set(self.generators))))

    @classmethod
    def parse(cls, spec: str, name: str | None = None) -> "GeneratorSet":
        label = None
        if "=" in spec:
            label = spec.split("=", 1)[0].strip()
        return cls(tuple(parse_generators(spec)), name or label or f"[{spec.strip()}]")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return "[" + ",".join(str(g) for g in self.generators) + "]"

    @property
    def max_arity(self) -> int:
        return max((g.arity for g in self.generators), default=1)

    def __iter__(self) -> Iterator[BoolFn]:
        return iter(self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    def union(self, other: Iterable[BoolFn], name: str | None = None) -> "GeneratorSet":
        return GeneratorSet(self.generators + tuple(other), name)


@dataclass(frozen=True)
class CloneSlice:
    arity: int
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if any(f.arity != self.arity for f in self.members):
            raise ValueError("slice members must share the slice arity")

    def __contains__(self, f: BoolFn) -> bool:
        return f in self.members

    def __iter__(self) -> Iterator[BoolFn]:
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.members)

    def sorted(self) -> list[BoolFn]:
        return sorted(self.members)

    def tables(self) -> list[int]:
        return sorted(f.table for f in self.members)

    def idempotent(self) -> "CloneSlice":
        return CloneSlice(self.arity, frozenset(f for f in self.members if is_idempotent(f)))


# -- explicit closure -----------------------------------------------------------


@lru_cache(maxsize=None)
def _residual_automaton(table: int, n: int):
    """States are sub-tables of ``g`` after fixing a prefix of its arguments.

    Returns (trans, leaf_bit): ``trans[s, b]`` is the state after fixing the
    next argument to ``b``; ``leaf_bit[s]`` is the output of a fully applied
    state (only meaningful for arity-0 states).
    """
    ids: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def get(m, t):
        key = (m, t)
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
        return ids[key]

    get(n, table)
    i = 0
    trans_rows = []
    while i < len(order):
        m, t = order[i]
        if m == 0:
            trans_rows.append((i, i))
        else:
            half = 1 << (m - 1)
            lo = t & ((1 << half) - 1)
            hi = t >> half
            trans_rows.append((get(m - 1, lo), get(m - 1, hi)))
        i += 1
    trans = np.array(trans_rows, dtype=np.int32)
    leaf = np.array([t & 1 if m == 0 else 0 for m, t in order], dtype=np.uint8)
    return trans, leaf


def _apply_generator(g: BoolFn, bits: np.ndarray, budget: int) -> set[int]:
    """All tables g(h1, ..., hn) with every h_i a row of ``bits``.

    ``bits`` has shape (members, points).  Argument positions are consumed
    one at a time and partial applications that agree pointwise are merged,
    so the work is governed by the number of distinct partial results.
    """
    trans, leaf = _residual_automaton(g.table, g.arity)
    nmem, npts = bits.shape
    states = np.zeros((1, npts), dtype=np.int32)
    for _ in range(g.arity):
        work = states.shape[0] * nmem * npts
        if work > budget:
            raise CloneTooLarge(f"closure step would touch {work} cells")
        # chunked so that peak memory stays bounded
        step = max(1, _CHUNK_CELLS // (nmem * npts))
        parts = [
            _unique_rows(trans[states[i : i + step, None, :], bits[None, :, :]].reshape(-1, npts), len(trans))
            for i in range(0, states.shape[0], step)
        ]
        states = parts[0] if len(parts) == 1 else _unique_rows(np.concatenate(parts), len(trans))
    out_bits = leaf[states].astype(object)
    weights = np.array([1 << x for x in range(npts)], dtype=object)
    return set(int(v) for v in out_bits.dot(weights))


_CHUNK_CELLS = 1 << 22


def _unique_rows(rows: np.ndarray, nstates: int) -> np.ndarray:
    width = max(1, (nstates - 1).bit_length())
    npts = rows.shape[1]
    if width * npts <= 63:
        # pack each row into one integer key; 1-d unique is far cheaper
        shifts = np.arange(npts, dtype=np.int64) * width
        keys = np.unique((rows.astype(np.int64) << shifts).sum(axis=1))
        return ((keys[:, None] >> shifts) & ((1 << width) - 1)).astype(np.int32)
    view = np.ascontiguousarray(rows).view(np.dtype((np.void, rows.dtype.itemsize * npts)))
    _, idx = np.unique(view.ravel(), return_index=True)
    return rows[np.sort(idx)]


def _table_bits(tables: Sequence[int], k: int) -> np.ndarray:
    npts = 1 << k
    return np.array([[(t >> x) & 1 for x in range(npts)] for t in tables], dtype=np.int32)


@lru_cache(maxsize=256)
def _closure_cached(gens: tuple[BoolFn, ...], k: int, max_members: int, budget: int) -> frozenset:
    members = {p.table for p in projections(k)}
    while True:
        bits = _table_bits(sorted(members), k)
        new = set(members)
        for g in gens:
            new |= _apply_generator(g, bits, budget)
            if len(new) > max_members:
                raise CloneTooLarge(f"more than {max_members} members at arity {k}")
        if new == members:
            return frozenset(members)
        members = new


def closure_at_arity(
    G: GeneratorSet | Iterable[BoolFn],
    k: int,
    max_members: int = 1 << 16,
    budget: int = CLOSURE_BUDGET,
) -> CloneSlice:
    """The ``k``-ary part of the clone generated by ``G``.

    Raises :class:`CloneTooLarge` when the fixpoint outgrows the budget.
    """
    if k < 1:
        raise ValueError("arity must be positive")
    gens = tuple(G.generators if isinstance(G, GeneratorSet) else sorted(set(G)))
    tables = _closure_cached(gens, k, max_members, budget)
    return CloneSlice(k, frozenset(BoolFn(k, t) for t in tables))


def naive_closure(gens: Iterable[BoolFn], k: int, max_arity: int | None = None) -> CloneSlice:
    """Reference closure by literal superposition with :func:`compose`.

    Closes the set of all operations of arity <= ``max_arity`` (default
    ``k``) under substitution of generators, then keeps arity ``k``.  Only
    usable for tiny arities; it exists to check :func:`closure_at_arity`.
    """
    from itertools import product

    gens = list(gens)
    top = max_arity or k
    layers = {a: {p.table for p in projections(a)} for a in range(1, top + 1)}
    changed = True
    while changed:
        changed = False
        for a in range(1, top + 1):
            cur = [BoolFn(a, t) for t in sorted(layers[a])]
            for g in gens:
                for args in product(cur, repeat=g.arity):
                    t = compose(g, args).table
                    if t not in layers[a]:
                        layers[a].add(t)
                        changed = True
            # minors into every other arity keep the layers consistent
            for b in range(1, top + 1):
                for f in cur:
                    for pi in all_index_maps(a, b):
                        t = minor(f, pi).table
                        if t not in layers[b]:
                            layers[b].add(t)
                            changed = True
    return CloneSlice(k, frozenset(BoolFn(k, t) for t in layers[k]))


# -- relational description ---------------------------------------------------

HORN = co_singleton("R110", (1, 1, 0))
DUAL_HORN = co_singleton("R001", (0, 0, 1))
EVEN4 = Relation("EVEN4", 4, [t for t in np.ndindex(2, 2, 2, 2) if sum(t) % 2 == 0])
# preserved exactly by the essentially unary operations (constants included)
DUP3 = Relation("DUP3", 3, [t for t in np.ndindex(2, 2, 2) if t not in ((0, 1, 0), (1, 0, 1))])


def nand_relation(k: int) -> Relation:
    return co_singleton(f"NAND{k}", (1,) * k)


@dataclass(frozen=True)
class Description:
    """Relations from the fixed family preserved by all generators.

    ``or_level``/``nand_level`` is the largest ``k`` for which ``B_k``
    (resp. its dual) is preserved; ``None`` means every ``k``.
    """

    zero: bool
    one: bool
    leq: bool
    neq: bool
    affine: bool
    horn: bool
    dual_horn: bool
    or_level: int | None
    nand_level: int | None
    unary: bool = False

    def flags(self) -> dict:
        return {
            "ZERO": self.zero, "ONE": self.one, "LEQ": self.leq, "NEQ": self.neq,
            "EVEN4": self.affine, "R110": self.horn, "R001": self.dual_horn,
            "B_k": "all" if self.or_level is None else self.or_level,
            "NAND_k": "all" if self.nand_level is None else self.nand_level,
            "DUP3": self.unary,
        }


def _level(gens: Sequence[BoolFn], make) -> int | None:
    # preserving B_k implies preserving B_j for j < k; for an n-ary operation
    # preserving B_n implies preserving every B_k
    top = max(max((g.arity for g in gens), default=1), 2)
    level = 1
    for k in range(2, top + 1):
        rel = make(k)
        if all(preserves(g, rel) for g in gens):
            level = k
        else:
            return level
    return None


def _monotone(f: BoolFn) -> bool:
    t, n = f.table, f.arity
    return all(
        (t >> x) & 1 <= (t >> (x | 1 << i)) & 1 for x in range(f.size) for i in range(n) if not (x >> i) & 1
    )


def _self_dual(f: BoolFn) -> bool:
    return dual(f) == f


def _affine(f: BoolFn) -> bool:
    t, n = f.table, f.arity
    c = t & 1
    coef = [((t >> (1 << i)) & 1) ^ c for i in range(n)]
    for x in range(f.size):
        v = c
        for i in range(n):
            if (x >> i) & 1:
                v ^= coef[i]
        if (t >> x) & 1 != v:
            return False
    return True


def _homomorphism(f: BoolFn, op) -> bool:
    t = f.table
    bit = [(t >> x) & 1 for x in range(f.size)]
    return all(bit[op(x, y)] == op(bit[x], bit[y]) for x in range(f.size) for y in range(x + 1, f.size))


def _essentially_unary_fn(f: BoolFn) -> bool:
    return f in _essentially_unary(f.arity)


# local characterisations of preserving each family member; the tests check
# them against brute-force preservation
_FAMILY_CHECKS = {
    "zero": lambda f: f.table & 1 == 0,
    "one": lambda f: (f.table >> (f.size - 1)) & 1 == 1,
    "leq": _monotone,
    "neq": _self_dual,
    "affine": _affine,
    "horn": lambda f: _homomorphism(f, lambda a, b: a & b),
    "dual_horn": lambda f: _homomorphism(f, lambda a, b: a | b),
    "unary": _essentially_unary_fn,
}
FAMILY_RELATIONS = {
    "zero": ZERO, "one": ONE, "leq": LEQ, "neq": NEQ, "affine": EVEN4,
    "horn": HORN, "dual_horn": DUAL_HORN, "unary": DUP3,
}


def family_preserved(f: BoolFn, member: str) -> bool:
    return _FAMILY_CHECKS[member](f)


@lru_cache(maxsize=None)
def _description(gens: tuple[BoolFn, ...]) -> Description:
    flags = {k: all(chk(g) for g in gens) for k, chk in _FAMILY_CHECKS.items()}
    return Description(
        or_level=_level(gens, blocker_relation),
        nand_level=_level(gens, nand_relation),
        **flags,
    )


def description(G: GeneratorSet | Iterable[BoolFn]) -> Description:
    gens = tuple(G.generators if isinstance(G, GeneratorSet) else sorted(set(G)))
    return _description(gens)


def add_description_constraints(search: CellSearch, symbol: int, desc: Description) -> None:
    """Constrain one symbol's table to the operations preserving ``desc``.

    Each family member is compiled into an equivalent local form rather than
    enumerating row selections: monotonicity on covering pairs, self-duality
    on complementary points, ``f(x^e)^f(x)^f(e)^f(0) = 0`` for parity,
    ``f(x&y) = f(x)&f(y)`` for ``R110``.
    """
    n = search.arities[symbol]
    full = (1 << n) - 1
    cell = lambda p: search.cell(symbol, p)  # noqa: E731
    if desc.unary:
        cells = [cell(p) for p in range(1 << n)]
        search.add_table(cells, [f.bits() for f in _essentially_unary(n)])
    if desc.zero:
        search.fix(cell(0), 0)
    if desc.one:
        search.fix(cell(full), 1)
    if desc.leq:
        le = [(0, 0), (0, 1), (1, 1)]
        for x in range(1 << n):
            for i in range(n):
                if not (x >> i) & 1:
                    search.add_table([cell(x), cell(x | 1 << i)], le)
    if desc.neq:
        for x in range(1 << (n - 1)):
            search.add_table([cell(x), cell(full ^ x)], [(0, 1), (1, 0)])
    if desc.affine:
        even = [t for t in np.ndindex(2, 2, 2, 2) if sum(t) % 2 == 0]
        for x in range(1 << n):
            for i in range(n):
                e = 1 << i
                if x < x ^ e:
                    search.add_table([cell(x), cell(x ^ e), cell(e), cell(0)], even)
    for flag, op in ((desc.horn, lambda a, b: a & b), (desc.dual_horn, lambda a, b: a | b)):
        if flag:
            allowed = [(a, b, op(a, b)) for a in (0, 1) for b in (0, 1)]
            for x in range(1 << n):
                for y in range(x + 1, 1 << n):
                    search.add_table([cell(x), cell(y), cell(op(x, y))], allowed)
    if desc.or_level is None or desc.or_level >= 2:
        k = n if desc.or_level is None else min(desc.or_level, n)
        if k >= 2:
            search.add_cover(symbol, (0,) * k)
    if desc.nand_level is None or desc.nand_level >= 2:
        k = n if desc.nand_level is None else min(desc.nand_level, n)
        if k >= 2:
            search.add_cover(symbol, (1,) * k)


def _essentially_unary(n: int) -> list[BoolFn]:
    out = [constant(0, n), constant(1, n)]
    for p in projections(n):
        out += [p, negate(p)]
    return out


def description_polymorphisms(desc: Description, k: int) -> CloneSlice:
    search = CellSearch([k])
    add_description_constraints(search, 0, desc)
    out = search.solve(limit=None)
    return CloneSlice(k, frozenset(BoolFn(k, t[0]) for t in out.solutions))


def description_admits(desc: Description, f: BoolFn) -> bool:
    search = CellSearch([f.arity])
    add_description_constraints(search, 0, desc)
    for p in range(f.size):
        search.fix(search.cell(0, p), (f.table >> p) & 1)
    return bool(search.solve(limit=1).solutions)


# -- membership and derived clones ------------------------------------------


# explicit slices used for membership and condition search stay below these
EXPLICIT_BUDGET = 40_000_000
EXPLICIT_MAX_MEMBERS = 4096


_TOO_LARGE: set[tuple] = set()


def explicit_slice(G: GeneratorSet, k: int, budget: int = EXPLICIT_BUDGET) -> CloneSlice | None:
    """The explicit slice when it fits the budget, else ``None``."""
    key = (G.generators, k, budget)
    if key in _TOO_LARGE:
        return None
    try:
        return closure_at_arity(G, k, max_members=EXPLICIT_MAX_MEMBERS, budget=budget)
    except CloneTooLarge:
        _TOO_LARGE.add(key)
        return None


def contains(G: GeneratorSet, f: BoolFn) -> bool:
    """Is ``f`` in the clone generated by ``G``?

    Decided on the explicit slice when it fits the budget, otherwise through
    the relational description.
    """
    sl = explicit_slice(G, f.arity)
    if sl is not None:
        return f in sl
    return description_admits(description(G), f)


def dual_clone(G: GeneratorSet) -> GeneratorSet:
    name = None
    if G.name:
        name = G.name + "^D"
    return GeneratorSet(tuple(dual(g) for g in G.generators), name)


def idempotent_reduct_at_arity(G: GeneratorSet, k: int) -> CloneSlice:
    return closure_at_arity(G, k).idempotent()


# -- catalog ------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    generators: GeneratorSet
    dual_label: str
    chain_index: int | None = None


DEFAULT_CHAIN_BOUND = 8


def _gs(label: str, *names: str) -> GeneratorSet:
    return GeneratorSet(tuple(named(n) for n in names), label)


def catalog(chain_bound: int = DEFAULT_CHAIN_BOUND) -> list[CatalogEntry]:
    """Every clone named in the class inventory, with chain members up to ``chain_bound``."""
    if chain_bound < 3:
        raise ValueError("chain bound must be at least 3")
    pairs: list[tuple[str, tuple[str, ...], str]] = [
        ("[∅]", (), "[∅]"),
        ("[c]", ("c",), "[c]"),
        ("[0]", ("0",), "[1]"),
        ("[1]", ("1",), "[0]"),
        ("[∧]", ("and",), "[∨]"),
        ("[∨]", ("or",), "[∧]"),
        ("[m]", ("m",), "[m]"),
        ("[m,c]", ("m", "c"), "[m,c]"),
        ("[d3]", ("d3",), "[d3]"),
        ("[d3,m]", ("d3", "m"), "[d3,m]"),
        ("[d3,c]", ("d3", "c"), "[d3,c]"),
        ("[p]", ("p",), "[p^Δ]"),
        ("[p^Δ]", ("p^Δ",), "[p]"),
        ("[q]", ("q",), "[q^Δ]"),
        ("[q^Δ]", ("q^Δ",), "[q]"),
        ("[∧,∨]", ("and", "or"), "[∧,∨]"),
        ("[∨,q]", ("or", "q"), "[∧,q^Δ]"),
        ("[∧,q^Δ]", ("and", "q^Δ"), "[∨,q]"),
        ("[m,q]", ("m", "q"), "[m,q^Δ]"),
        ("[m,q^Δ]", ("m", "q^Δ"), "[m,q]"),
    ]
    out = [CatalogEntry(label, _gs(label, *names), dl) for label, names, dl in pairs]
    for i in range(3, chain_bound + 1):
        di = f"d{i}"
        # d3 is self-dual; for i >= 4 the dual chain needs d_i^Δ
        ddi = di if i == 3 else f"d{i}^Δ"
        for b in ("p", "q"):
            label, dlabel = f"[{di},{b}]", f"[{ddi},{b}^Δ]"
            out.append(CatalogEntry(label, _gs(label, di, b), dlabel, i))
            out.append(CatalogEntry(dlabel, _gs(dlabel, ddi, b + "^Δ"), label, i))
        if i >= 4:
            out.append(CatalogEntry(f"[{di}]", _gs(f"[{di}]", di), f"[{ddi}]", i))
            out.append(CatalogEntry(f"[{ddi}]", _gs(f"[{ddi}]", ddi), f"[{di}]", i))
    # the clone of all idempotent operations, generated at arity 3 by all
    # idempotent ternary tables
    idem = GeneratorSet(
        tuple(BoolFn(3, t) for t in range(256) if is_idempotent(BoolFn(3, t))), "[all idempotent]"
    )
    out.append(CatalogEntry("[all idempotent]", idem, "[all idempotent]"))
    return out


def catalog_entry(label: str, chain_bound: int = DEFAULT_CHAIN_BOUND) -> CatalogEntry:
    for e in catalog(chain_bound):
        if e.label == label:
            return e
    raise KeyError(f"no catalog entry {label!r}")


# -- minor-preserving maps ----------------------------------------------------


class RuleNotApplicable(ValueError):
    pass


MINOR_MAP_RULES = ("dual-map", "constant-map", "negation-collapse", "idempotentizer")


@dataclass
class MinorMapReport:
    rule: str
    ok: bool
    checked: int = 0
    failure: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _rule_map(rule: str, source: GeneratorSet, target: GeneratorSet, cap: int):
    if rule == "dual-map":
        return dual
    if rule == "constant-map":
        consts = [f for f in closure_at_arity(target, 1) if is_constant(f)]
        if not consts:
            raise RuleNotApplicable("target clone contains no constant operation")
        value = consts[0].table & 1
        return lambda f: constant(value, f.arity)
    if rule == "negation-collapse":
        for n in range(1, cap + 1):
            projs = {p.table for p in projections(n)}
            for f in closure_at_arity(source, n):
                if f.table not in projs and negate(f).table not in projs:
                    raise RuleNotApplicable(f"{f} is neither a projection nor a negated projection")
        return lambda f: f if is_idempotent(f) else negate(f)
    if rule == "idempotentizer":
        for n in range(1, cap + 1):
            for f in closure_at_arity(source, n):
                if is_constant(f):
                    raise RuleNotApplicable(f"source contains the constant operation {f}")
        return lambda f: f if is_idempotent(f) else negate(f)
    raise ValueError(f"unknown rule {rule!r}; expected one of {MINOR_MAP_RULES}")


def verify_minor_map(rule: str, source: GeneratorSet, target: GeneratorSet, cap: int = 3) -> MinorMapReport:
    """Check that ``rule`` is a minor-preserving map source -> target up to ``cap``.

    For every member ``f`` of the source of arity ``n <= cap`` and every index
    map ``pi`` into arity ``r <= cap``: ``xi(f_pi) == xi(f)_pi`` and
    ``xi(f)`` lies in the target.  Raises :class:`RuleNotApplicable` when a
    precondition fails.
    """
    xi = _rule_map(rule, source, target, cap)
    slices = {n: closure_at_arity(source, n) for n in range(1, cap + 1)}
    targets = {n: closure_at_arity(target, n) for n in range(1, cap + 1)}
    checked = 0
    for n, sl in slices.items():
        for f in sl:
            img = xi(f)
            if img not in targets[n]:
                return MinorMapReport(rule, False, checked, f"image of {f} is {img}, not in target")
            for r in range(1, cap + 1):
                for pi in all_index_maps(n, r):
                    checked += 1
                    if xi(minor(f, pi)) != minor(img, pi):
                        return MinorMapReport(
                            rule, False, checked, f"xi(f_pi) != xi(f)_pi for f={f}, pi={pi.image}"
                        )
    return MinorMapReport(rule, True, checked)
