"""Backtracking over truth-table cells.

Every unknown operation symbol contributes ``2**arity`` Boolean cells.
Height-1 identities become cell equalities, merged by union-find before the
search starts.  Relations contribute two kinds of constraints:

* table constraints -- a tuple of cells whose joint value must lie in an
  allowed set; propagated by filtering the allowed tuples against the
  current partial assignment;
* cover constraints -- preservation of a relation of the form
  ``{0,1}^r minus one tuple``, checked by a small set-cover computation
  instead of enumerating ``(2^r - 1)^n`` row selections.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class SearchLimitExceeded(RuntimeError):
    pass


@dataclass
class SearchOutcome:
    solutions: list[list[int]]
    nodes: int
    exhaustive: bool


@dataclass
class _Cover:
    symbol: int
    missing: tuple[int, ...]
    counts: tuple[int, int] = field(init=False)

    def __post_init__(self):
        self.counts = (self.missing.count(0), self.missing.count(1))


class CellSearch:
    """Finds tables for a list of symbols subject to cell constraints."""

    def __init__(self, arities: Sequence[int]):
        self.arities = list(arities)
        self.offsets = []
        total = 0
        for n in self.arities:
            self.offsets.append(total)
            total += 1 << n
        self.ncells = total
        self._parent = list(range(total))
        self._tables: list[tuple[tuple[int, ...], frozenset]] = []
        self._covers: list[_Cover] = []
        self._fixed: list[tuple[int, int]] = []

    def cell(self, symbol: int, index: int) -> int:
        return self.offsets[symbol] + index

    def _find(self, c: int) -> int:
        while self._parent[c] != c:
            self._parent[c] = self._parent[self._parent[c]]
            c = self._parent[c]
        return c

    def merge(self, a: int, b: int) -> None:
        ra, rb = self._find(a), self._find(b)
        if ra != rb:
            if ra < rb:
                self._parent[rb] = ra
            else:
                self._parent[ra] = rb

    def fix(self, cell: int, value: int) -> None:
        self._fixed.append((cell, value))

    def add_table(self, cells: Sequence[int], allowed: Iterable[tuple[int, ...]]) -> None:
        self._tables.append((tuple(cells), frozenset(allowed)))

    def add_cover(self, symbol: int, missing: Sequence[int]) -> None:
        self._covers.append(_Cover(symbol, tuple(missing)))

    # -- search ---------------------------------------------------------

    def _prepare(self):
        cls = [self._find(c) for c in range(self.ncells)]
        order = sorted(set(cls))
        idx = {c: i for i, c in enumerate(order)}
        self._cls = [idx[c] for c in cls]
        nvars = len(order)
        self._members: list[list[tuple[int, int]]] = [[] for _ in range(nvars)]
        for s, off in enumerate(self.offsets):
            for p in range(1 << self.arities[s]):
                self._members[self._cls[off + p]].append((s, p))
        self._cons: list[tuple[tuple[int, ...], list[tuple[int, ...]]]] = []
        self._watch: list[list[int]] = [[] for _ in range(nvars)]
        self._dead = False
        seen = set()
        for cells, allowed in self._tables:
            vs = tuple(self._cls[c] for c in cells)
            # collapse repeated variables: keep tuples agreeing on repeats
            uniq = tuple(dict.fromkeys(vs))
            pos = [vs.index(v) for v in uniq]
            ok = set()
            for t in allowed:
                if all(t[i] == t[pos[uniq.index(v)]] for i, v in enumerate(vs)):
                    ok.add(tuple(t[j] for j in pos))
            key = (uniq, frozenset(ok))
            if key in seen:
                continue
            seen.add(key)
            if not ok:
                self._dead = True
            if len(ok) == 1 << len(uniq):
                continue
            ci = len(self._cons)
            self._cons.append((uniq, sorted(ok)))
            for v in uniq:
                self._watch[v].append(ci)
        self._cover_by_symbol: dict[int, list[_Cover]] = {}
        for cov in self._covers:
            self._cover_by_symbol.setdefault(cov.symbol, []).append(cov)
        self._nvars = nvars

    def _value(self, symbol: int, p: int) -> int:
        return self._assign[self._cls[self.offsets[symbol] + p]]

    def _cover_violated(self, cov: _Cover, p: int, b: int) -> bool:
        """Would the decided cells of ``cov.symbol`` (with cell ``p`` = ``b``)
        produce the missing tuple from columns inside the relation?"""
        n = self.arities[cov.symbol]
        full = (1 << n) - 1
        need = list(cov.counts)
        if need[b] == 0:
            return False
        pools: list[set[int]] = [set(), set()]
        for q in range(1 << n):
            v = self._value(cov.symbol, q)
            if v >= 0 and need[v]:
                # coordinates where row q differs from the missing value v
                pools[v].add(q ^ (full if v else 0))
        if need[1 - b] and not pools[1 - b]:
            return False
        start = p ^ (full if b else 0)
        if start == full:
            return True
        reach = {start}
        need[b] -= 1
        for v in (0, 1):
            pool = _maximal(pools[v])
            for _ in range(need[v]):
                nxt = {u | s for u in reach for s in pool}
                if full in nxt:
                    return True
                if nxt == reach:
                    break
                reach = nxt
        return full in reach

    def _set(self, var: int, value: int, trail: list[int]) -> bool:
        """Assign and propagate; False on conflict."""
        queue = [(var, value)]
        while queue:
            v, val = queue.pop()
            cur = self._assign[v]
            if cur >= 0:
                if cur != val:
                    return False
                continue
            self._assign[v] = val
            trail.append(v)
            for ci in self._watch[v]:
                vs, allowed = self._cons[ci]
                vals = [self._assign[u] for u in vs]
                cons = [t for t in allowed if all(x < 0 or x == y for x, y in zip(vals, t))]
                if not cons:
                    return False
                for i, u in enumerate(vs):
                    if vals[i] < 0:
                        first = cons[0][i]
                        if all(t[i] == first for t in cons):
                            queue.append((u, first))
            for s, p in self._members[v]:
                for cov in self._cover_by_symbol.get(s, ()):
                    if self._cover_violated(cov, p, val):
                        return False
        return True

    def _undo(self, trail: list[int], mark: int) -> None:
        while len(trail) > mark:
            self._assign[trail.pop()] = -1

    def _solution(self) -> list[int]:
        out = []
        for s, n in enumerate(self.arities):
            out.append(sum(self._value(s, p) << p for p in range(1 << n)))
        return out

    def solve(self, limit: int | None = 1, max_nodes: int | None = None) -> SearchOutcome:
        """Depth-first search, variables in cell order, value 0 before 1."""
        self._prepare()
        self._assign = [-1] * self._nvars
        trail: list[int] = []
        solutions: list[list[int]] = []
        nodes = 0
        if self._dead:
            return SearchOutcome([], 0, True)
        for c, val in self._fixed:
            if not self._set(self._cls[c], val, trail):
                return SearchOutcome([], 0, True)
        # constraints with no watched assignment yet may already force values
        for ci, (vs, allowed) in enumerate(self._cons):
            for i, u in enumerate(vs):
                first = allowed[0][i]
                if all(t[i] == first for t in allowed):
                    if not self._set(u, first, trail):
                        return SearchOutcome([], 0, True)

        stack: list[tuple[int, int, int]] = []  # (var, next value to try, trail mark)
        var = self._next_var(0)
        if var is None:
            return SearchOutcome([self._solution()], 0, True)
        stack.append((var, 0, len(trail)))
        while stack:
            v, val, mark = stack.pop()
            self._undo(trail, mark)
            if val > 1:
                continue
            stack.append((v, val + 1, mark))
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                return SearchOutcome(solutions, nodes, False)
            if not self._set(v, val, trail):
                continue
            nxt = self._next_var(v + 1)
            if nxt is None:
                solutions.append(self._solution())
                if limit is not None and len(solutions) >= limit:
                    return SearchOutcome(solutions, nodes, False)
                continue
            stack.append((nxt, 0, len(trail)))
        return SearchOutcome(solutions, nodes, True)

    def _next_var(self, start: int) -> int | None:
        for v in range(start, self._nvars):
            if self._assign[v] < 0:
                return v
        return None


def _maximal(masks: set[int]) -> list[int]:
    out = []
    for m in sorted(masks, key=lambda x: -bin(x).count("1")):
        if not any(m | o == o for o in out):
            out.append(m)
    return out
