"""Finite Boolean operations stored as truth tables.

An ``n``-ary operation is an integer with ``2**n`` significant bits.  Bit ``i``
holds the value on the argument tuple whose binary expansion is ``i`` with
``x1`` as the most significant bit, so ``(x1, ..., xn)`` sits at index
``sum(x_j * 2**(n - j))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

MAX_ARITY = 16


@dataclass(frozen=True, order=True, slots=True)
class BoolFn:
    arity: int
    table: int

    def __post_init__(self):
        if not 1 <= self.arity <= MAX_ARITY:
            raise ValueError(f"arity must be in 1..{MAX_ARITY}, got {self.arity}")
        if not 0 <= self.table < 1 << (1 << self.arity):
            raise ValueError("table has bits beyond 2**arity entries")

    @classmethod
    def from_bits(cls, bits: Sequence[int] | str) -> "BoolFn":
        """Build from the table listed in index order, e.g. ``"00010111"``."""
        bits = [int(b) for b in bits]
        n = len(bits).bit_length() - 1
        if n < 1 or len(bits) != 1 << n:
            raise ValueError(f"table length {len(bits)} is not a power of two >= 2")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("table entries must be 0 or 1")
        return cls(n, sum(b << i for i, b in enumerate(bits)))

    @classmethod
    def parse(cls, text: str) -> "BoolFn":
        """Parse the ``arity:bits`` rendering."""
        m = re.fullmatch(r"\s*(\d+)\s*:\s*([01]+)\s*", text)
        if not m:
            raise ValueError(f"not an 'arity:bits' table: {text!r}")
        fn = cls.from_bits(m.group(2))
        if fn.arity != int(m.group(1)):
            raise ValueError(f"{text!r}: arity does not match table length")
        return fn

    @property
    def size(self) -> int:
        return 1 << self.arity

    @property
    def mask(self) -> int:
        return (1 << self.size) - 1

    def bits(self) -> tuple[int, ...]:
        return tuple((self.table >> i) & 1 for i in range(self.size))

    def __call__(self, *args: int) -> int:
        return eval_fn(self, args)

    def __str__(self) -> str:
        return f"{self.arity}:" + "".join(map(str, self.bits()))


@dataclass(frozen=True, slots=True)
class IndexMap:
    """pi: {1..source_arity} -> {1..target_arity}, stored as its image."""

    target_arity: int
    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(self.image))
        if self.target_arity < 1:
            raise ValueError("target arity must be positive")
        if not self.image:
            raise ValueError("index map must have a nonempty domain")
        for v in self.image:
            if not 1 <= v <= self.target_arity:
                raise ValueError(f"image entry {v} outside 1..{self.target_arity}")

    @property
    def source_arity(self) -> int:
        return len(self.image)

    def then(self, other: "IndexMap") -> "IndexMap":
        """The composite ``other o self`` (apply ``self`` first)."""
        if other.source_arity != self.target_arity:
            raise ValueError("index maps do not compose")
        return IndexMap(other.target_arity, tuple(other.image[v - 1] for v in self.image))


def index_of(args: Sequence[int]) -> int:
    i = 0
    for a in args:
        i = (i << 1) | a
    return i


def point(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - j)) & 1 for j in range(n))


def eval_fn(f: BoolFn, args: Sequence[int]) -> int:
    if len(args) != f.arity:
        raise ValueError(f"expected {f.arity} arguments, got {len(args)}")
    if any(a not in (0, 1) for a in args):
        raise ValueError("arguments must be bits")
    return (f.table >> index_of(args)) & 1


@lru_cache(maxsize=None)
def _minor_table(table: int, n: int, image: tuple[int, ...], r: int) -> int:
    out = 0
    for a in range(1 << r):
        idx = 0
        for v in image:
            idx = (idx << 1) | ((a >> (r - v)) & 1)
        out |= ((table >> idx) & 1) << a
    return out


def minor(f: BoolFn, pi: IndexMap | Sequence[int], target_arity: int | None = None) -> BoolFn:
    """f_pi(x1..xr) = f(x_pi(1), ..., x_pi(n))."""
    if not isinstance(pi, IndexMap):
        pi = IndexMap(target_arity if target_arity is not None else max(pi), tuple(pi))
    if pi.source_arity != f.arity:
        raise ValueError(f"index map has domain size {pi.source_arity}, operation has arity {f.arity}")
    return BoolFn(pi.target_arity, _minor_table(f.table, f.arity, pi.image, pi.target_arity))


def projection(i: int, n: int) -> BoolFn:
    if not 1 <= i <= n:
        raise ValueError(f"projection index {i} outside 1..{n}")
    return BoolFn(n, _projection_table(i, n))


@lru_cache(maxsize=None)
def _projection_table(i: int, n: int) -> int:
    return sum(((a >> (n - i)) & 1) << a for a in range(1 << n))


def projections(n: int) -> list[BoolFn]:
    return [projection(i, n) for i in range(1, n + 1)]


def compose(f: BoolFn, gs: Sequence[BoolFn]) -> BoolFn:
    """h(x) = f(g1(x), ..., gn(x))."""
    if len(gs) != f.arity:
        raise ValueError(f"{f.arity}-ary operation needs {f.arity} inner operations, got {len(gs)}")
    k = gs[0].arity
    if any(g.arity != k for g in gs):
        raise ValueError("inner operations must share one arity")
    mask = (1 << (1 << k)) - 1
    out = 0
    for b in range(f.size):
        if not (f.table >> b) & 1:
            continue
        term = mask
        for j, g in enumerate(gs):
            bit = (b >> (f.arity - 1 - j)) & 1
            term &= g.table if bit else ~g.table & mask
            if not term:
                break
        out |= term
    return BoolFn(k, out)


def negate(f: BoolFn) -> BoolFn:
    return BoolFn(f.arity, ~f.table & f.mask)


def dual(f: BoolFn) -> BoolFn:
    """f^D(x) = c(f(c(x1), ..., c(xn)))."""
    top = f.size - 1
    out = 0
    for a in range(f.size):
        if not (f.table >> (top - a)) & 1:
            out |= 1 << a
    return BoolFn(f.arity, out)


def is_idempotent(f: BoolFn) -> bool:
    return (f.table & 1) == 0 and (f.table >> (f.size - 1)) & 1 == 1


def is_constant(f: BoolFn) -> bool:
    return f.table in (0, f.mask)


def constant(value: int, n: int = 1) -> BoolFn:
    return BoolFn(n, ((1 << (1 << n)) - 1) if value else 0)


def from_function(n: int, fn) -> BoolFn:
    """Tabulate a Python callable on all of {0,1}^n."""
    return BoolFn(n, sum((int(fn(*point(a, n))) & 1) << a for a in range(1 << n)))


def threshold(n: int, k: int) -> BoolFn:
    """1 iff at least ``k`` of the ``n`` arguments are 1."""
    return BoolFn(n, sum(1 << a for a in range(1 << n) if bin(a).count("1") >= k))


def d(n: int) -> BoolFn:
    """d_n: disjunction over i of the conjunction of all arguments except x_i."""
    if n < 3:
        raise ValueError("d_n is defined here for n >= 3")
    return threshold(n, n - 1)


_NAMED = {
    "0": lambda: constant(0),
    "1": lambda: constant(1),
    "c": lambda: BoolFn.from_bits("10"),
    "and": lambda: BoolFn.from_bits("0001"),
    "or": lambda: BoolFn.from_bits("0111"),
    "xor": lambda: BoolFn.from_bits("0110"),
    "xnor": lambda: BoolFn.from_bits("1001"),
    "imp": lambda: BoolFn.from_bits("1101"),
    "star": lambda: BoolFn.from_bits("0100"),
    "m": lambda: from_function(3, lambda x, y, z: x ^ y ^ z),
    "p": lambda: from_function(3, lambda x, y, z: x & (y | z)),
    "q": lambda: from_function(3, lambda x, y, z: x & (1 ^ y ^ z)),
}

_ALIASES = {
    "∧": "and", "^": "and", "&": "and", "meet": "and",
    "∨": "or", "v": "or", "|": "or", "join": "or",
    "⊕": "xor", "+": "xor",
    "⊕'": "xnor", "⊕′": "xnor", "xor'": "xnor", "eq": "xnor",
    "→": "imp", "->": "imp",
    "∗": "star", "*": "star",
    "neg": "c", "not": "c",
}

_DUAL_SUFFIX = re.compile(r"^(.*?)(\^Δ|\^D|\^d|Δ|_dual|dual)$")


def named(name: str) -> BoolFn:
    """Look up an operation by name.

    Accepts ``0 1 c and or xor xnor imp star m p q``, ``d<n>`` (n >= 3),
    ``pi<i>_<n>`` for projections, the symbolic aliases (``∧ ∨ ⊕ ⊕′ → ∗``),
    a dual suffix (``p^Δ``, ``q^D``, ``pdual``) and raw ``arity:bits`` tables.
    """
    s = name.strip()
    if ":" in s:
        return BoolFn.parse(s)
    m = _DUAL_SUFFIX.match(s)
    if m and m.group(1):
        return dual(named(m.group(1)))
    key = _ALIASES.get(s, s.lower())
    if key in _NAMED:
        return _NAMED[key]()
    if m := re.fullmatch(r"d_?(\d+)", key):
        return d(int(m.group(1)))
    if m := re.fullmatch(r"(?:pi|π|proj)_?(\d+)[_,^](\d+)", key):
        return projection(int(m.group(1)), int(m.group(2)))
    raise KeyError(f"unknown operation name {name!r}")


def parse_generators(spec: str) -> list[BoolFn]:
    """Comma-separated names or tables; the empty string is the empty set."""
    spec = spec.strip()
    if spec.startswith("["):
        spec = spec.strip("[]")
    if "=" in spec:
        spec = spec.split("=", 1)[1]
    if spec.strip() in ("", "∅"):
        return []
    return [named(part) for part in spec.split(",") if part.strip()]


def all_index_maps(n: int, r: int) -> Iterable[IndexMap]:
    """Every map {1..n} -> {1..r}."""
    from itertools import product

    for image in product(range(1, r + 1), repeat=n):
        yield IndexMap(r, image)
