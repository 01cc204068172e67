"""Primitive positive formulas, pp-powers, homomorphisms and pp-construction
certificates.

A certificate says: the structure ``power`` built on ``source^n`` from pp
formulas is homomorphically equivalent to ``target``; the two maps are
part of the certificate and are checked tuple by tuple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Hashable, Mapping, Sequence

from .structures import Relation, Structure, load_structure

DATA = Path(__file__).with_name("data")
MAX_POWER_DIMENSION = 4


@dataclass(frozen=True)
class PpFormula:
    """Variables ``0 .. free_vars-1`` are free, the next ``existential_vars``
    are existentially quantified."""

    free_vars: int
    existential_vars: int = 0
    atoms: tuple[tuple[str, tuple[int, ...]], ...] = ()
    equalities: tuple[tuple[int, int], ...] = ()
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        n = self.free_vars + self.existential_vars
        for rel, args in self.atoms:
            if any(not 0 <= v < n for v in args):
                raise ValueError(f"atom {rel}{args} uses a variable outside 0..{n - 1}")
        for a, b in self.equalities:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"equality {a}={b} uses a variable outside 0..{n - 1}")

    @property
    def nvars(self) -> int:
        return self.free_vars + self.existential_vars

    def var_name(self, v: int) -> str:
        if self.names and v < len(self.names):
            return self.names[v]
        return f"x{v + 1}" if v < self.free_vars else f"e{v - self.free_vars + 1}"

    def render(self) -> str:
        parts = [f"{r}({','.join(self.var_name(v) for v in args)})" for r, args in self.atoms]
        parts += [f"{self.var_name(a)}={self.var_name(b)}" for a, b in self.equalities]
        return " & ".join(parts) if parts else "true"

    def classes(self) -> list[int]:
        """Union-find representative (smallest member) of every variable."""
        parent = list(range(self.nvars))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.equalities:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return [find(v) for v in range(self.nvars)]


def _check_signature(A: Structure, phi: PpFormula) -> None:
    sig = A.signature()
    for rel, args in phi.atoms:
        if rel not in sig:
            raise KeyError(f"relation {rel!r} is not in the signature of {A.name}")
        if sig[rel] != len(args):
            raise ValueError(f"relation {rel} has arity {sig[rel]}, atom has {len(args)} arguments")


def eval_pp(A: Structure, phi: PpFormula) -> Relation:
    """The relation defined by ``phi`` in ``A``."""
    _check_signature(A, phi)
    cls = phi.classes()
    reps = sorted(set(cls))
    pos = {r: i for i, r in enumerate(reps)}
    free_reps = sorted({cls[v] for v in range(phi.free_vars)})
    ex_reps = [r for r in reps if r not in free_reps]
    atoms = [(A.relation(rel).tuples, tuple(pos[cls[v]] for v in args)) for rel, args in phi.atoms]
    out = set()
    val = [None] * len(reps)
    for fv in product(A.domain, repeat=len(free_reps)):
        for r, x in zip(free_reps, fv):
            val[pos[r]] = x
        if _extend(val, [pos[r] for r in ex_reps], atoms, A.domain):
            out.add(tuple(val[pos[cls[v]]] for v in range(phi.free_vars)))
    return Relation("pp", phi.free_vars, out)


def _extend(val, todo, atoms, domain) -> bool:
    """Backtrack over the existential positions ``todo``."""

    def consistent():
        for tuples, args in atoms:
            t = tuple(val[a] for a in args)
            if None not in t and t not in tuples:
                return False
        return True

    def go(i):
        if not consistent():
            return False
        if i == len(todo):
            return True
        for x in domain:
            val[todo[i]] = x
            if go(i + 1):
                return True
        val[todo[i]] = None
        return False

    for p in todo:
        val[p] = None
    return go(0)


# -- formula text -----------------------------------------------------------------

_VAR = r"[A-Za-z_][A-Za-z0-9_']*"


def singleton_relation(A: Structure, value) -> str:
    for r in A.relations:
        if r.arity == 1 and r.tuples == frozenset({(value,)}):
            return r.name
    raise ValueError(f"{A.name} has no unary relation {{{value}}}; 'x={value}' is not expressible")


def parse_formula(text: str, free: Sequence[str], source: Structure) -> PpFormula:
    """Parse ``R(x1,y1) & x2=y2 & x1=0``; unknown variables are existential.

    ``x=0`` and ``x=1`` expand to the source's singleton unary relations.
    """
    names = list(free)
    if len(set(names)) != len(names):
        raise ValueError("repeated free variable")

    def var(name):
        if name not in names:
            names.append(name)
        return names.index(name)

    atoms, eqs = [], []
    body = text.strip()
    if body and body != "true":
        for part in re.split(r"&|∧", body):
            part = part.strip()
            if m := re.fullmatch(rf"({_VAR})\s*\(([^()]*)\)", part):
                args = [a.strip() for a in m.group(2).split(",") if a.strip()]
                atoms.append((m.group(1), tuple(var(a) for a in args)))
            elif m := re.fullmatch(rf"({_VAR})\s*=\s*([01])", part):
                atoms.append((singleton_relation(source, int(m.group(2))), (var(m.group(1)),)))
            elif m := re.fullmatch(rf"({_VAR})\s*=\s*({_VAR})", part):
                eqs.append((var(m.group(1)), var(m.group(2))))
            else:
                raise ValueError(f"cannot parse pp atom {part!r}")
    phi = PpFormula(len(free), len(names) - len(free), tuple(atoms), tuple(eqs), tuple(names))
    _check_signature(source, phi)
    return phi


# -- pp-powers --------------------------------------------------------------------


@dataclass(frozen=True)
class PpPower:
    source: Structure
    dimension: int
    formulas: tuple[tuple[str, int, PpFormula], ...]

    def __post_init__(self):
        if not 1 <= self.dimension <= MAX_POWER_DIMENSION:
            raise ValueError(f"power dimension must be in 1..{MAX_POWER_DIMENSION}")
        for name, k, phi in self.formulas:
            if phi.free_vars != k * self.dimension:
                raise ValueError(
                    f"formula for {name}: {phi.free_vars} free variables, expected {k}*{self.dimension}"
                )
            _check_signature(self.source, phi)


def build_power(P: PpPower) -> Structure:
    """The structure on ``source.domain^n`` defined by the formulas."""
    n = P.dimension
    domain = tuple(product(P.source.domain, repeat=n))
    rels = []
    for name, k, phi in P.formulas:
        flat = eval_pp(P.source, phi)
        tuples = [tuple(t[i * n : (i + 1) * n] for i in range(k)) for t in flat.tuples]
        rels.append(Relation(name, k, tuples))
    return Structure(f"{P.source.name}^{n}", tuple(rels), domain)


# -- homomorphisms ------------------------------------------------------------------


def _same_signature(A: Structure, B: Structure) -> None:
    if A.signature() != B.signature():
        raise ValueError(f"signatures differ: {A.signature()} vs {B.signature()}")


def find_homomorphism(A: Structure, B: Structure) -> dict | None:
    """A relation-preserving map ``A.domain -> B.domain``, or ``None`` after
    exhausting the search."""
    _same_signature(A, B)
    order = list(A.domain)
    rank = {a: i for i, a in enumerate(order)}
    # each tuple of A is checked once its last element (in order) is assigned
    due: list[list[tuple[tuple, frozenset]]] = [[] for _ in order]
    for r in A.relations:
        target = B.relation(r.name).tuples
        for t in r.tuples:
            if not t:
                continue
            due[max(rank[a] for a in t)].append((t, target))
    if any(not B.relation(r.name).tuples and r.tuples for r in A.relations):
        return None
    h: dict = {}

    def go(i):
        if i == len(order):
            return True
        a = order[i]
        for b in B.domain:
            h[a] = b
            if all(tuple(h[x] for x in t) in target for t, target in due[i]):
                if go(i + 1):
                    return True
        h.pop(a, None)
        return False

    return dict(h) if go(0) else None


def is_homomorphism(h: Mapping, A: Structure, B: Structure) -> bool:
    return not hom_violations(h, A, B)


def hom_violations(h: Mapping, A: Structure, B: Structure, limit: int = 5) -> list[str]:
    out = []
    missing = [a for a in A.domain if a not in h]
    if missing:
        return [f"map undefined on {missing[0]!r}"]
    for r in A.relations:
        target = B.relation(r.name).tuples
        for t in sorted(r.tuples):
            img = tuple(h[x] for x in t)
            if img not in target:
                out.append(f"relation {r.name}: {_show(t)} maps to {_show(img)}, not in {r.name}")
                if len(out) >= limit:
                    return out
    return out


def _show(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(_show(y) for y in x) + ")"
    return str(x)


def hom_equivalent(A: Structure, B: Structure) -> bool:
    return find_homomorphism(A, B) is not None and find_homomorphism(B, A) is not None


# -- certificates ----------------------------------------------------------------------


@dataclass
class PpCertificate:
    source: Structure
    target: Structure
    power: PpPower
    hom_to_target: dict[Hashable, Hashable]
    hom_from_target: dict[Hashable, Hashable]
    name: str = "certificate"


@dataclass
class CertificateReport:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(c: PpCertificate) -> CertificateReport:
    """Build the power and check both maps against it and the target."""
    problems = []
    names = [name for name, _, _ in c.power.formulas]
    if sorted(names) != sorted(c.target.signature()):
        problems.append(f"power defines {sorted(names)}, target has {sorted(c.target.signature())}")
        return CertificateReport(False, problems)
    for name, k, _ in c.power.formulas:
        if c.target.signature()[name] != k:
            problems.append(f"relation {name}: power arity {k}, target arity {c.target.signature()[name]}")
    if c.power.source != c.source:
        problems.append("power is built over a different source structure")
    if problems:
        return CertificateReport(False, problems)
    try:
        built = build_power(c.power)
    except (KeyError, ValueError) as exc:
        return CertificateReport(False, [f"building the power failed: {exc}"])
    # the built power carries the target's relation order
    built = Structure(built.name, tuple(built.relation(r.name) for r in c.target.relations), built.domain)
    problems += [f"to target: {p}" for p in hom_violations(c.hom_to_target, built, c.target)]
    problems += [f"from target: {p}" for p in hom_violations(c.hom_from_target, c.target, built)]
    return CertificateReport(not problems, problems)


def identity_certificate(A: Structure) -> PpCertificate:
    formulas = tuple(
        (r.name, r.arity, PpFormula(r.arity, 0, ((r.name, tuple(range(r.arity))),))) for r in A.relations
    )
    power = PpPower(A, 1, formulas)
    return PpCertificate(
        A, A, power, {(a,): a for a in A.domain}, {a: (a,) for a in A.domain}, f"identity({A.name})"
    )


# -- certificate files ------------------------------------------------------------------


def _bits(t: tuple) -> str:
    return "".join(str(x) for x in t)


def dump_certificate(c: PpCertificate, source_ref: str | None = None, target_ref: str | None = None) -> str:
    n = c.power.dimension
    lines = [
        f"source: {source_ref or c.source.name}",
        f"target: {target_ref or c.target.name}",
        f"dimension: {n}",
    ]
    for name, k, phi in c.power.formulas:
        free = [phi.var_name(v) for v in range(phi.free_vars)]
        lines.append(f"relation {name}({','.join(free)}) := {phi.render()}")
    lines.append(
        "to_target: " + ", ".join(f"{_bits(a)}->{b}" for a, b in sorted(c.hom_to_target.items()))
    )
    lines.append(
        "from_target: " + ", ".join(f"{a}->{_bits(b)}" for a, b in sorted(c.hom_from_target.items()))
    )
    return "\n".join(lines) + "\n"


def _resolve_structure(ref: str, base: Path | None) -> Structure:
    if base is not None and (base / ref).exists():
        return load_structure(base / ref)
    return load_structure(ref)


def parse_certificate(text: str, base: Path | None = None, name: str = "certificate") -> PpCertificate:
    fields: dict[str, str] = {}
    rels: list[tuple[str, list[str], str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := re.fullmatch(rf"relation\s+({_VAR})\s*\(([^()]*)\)\s*:=\s*(.*)", line):
            free = [v.strip() for v in m.group(2).split(",") if v.strip()]
            rels.append((m.group(1), free, m.group(3)))
        elif m := re.fullmatch(r"(\w+)\s*:\s*(.*)", line):
            fields[m.group(1)] = m.group(2).strip()
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    for key in ("source", "target", "dimension", "to_target", "from_target"):
        if key not in fields:
            raise ValueError(f"certificate lacks a '{key}:' line")
    source = _resolve_structure(fields["source"], base)
    target = _resolve_structure(fields["target"], base)
    n = int(fields["dimension"])
    formulas = []
    for rname, free, body in rels:
        if len(free) % n:
            raise ValueError(f"relation {rname}: {len(free)} free variables is not a multiple of {n}")
        formulas.append((rname, len(free) // n, parse_formula(body, free, source)))
    power = PpPower(source, n, tuple(formulas))
    to_target = {}
    for a, b in _pairs(fields["to_target"]):
        to_target[tuple(int(ch) for ch in a)] = int(b)
    from_target = {}
    for a, b in _pairs(fields["from_target"]):
        from_target[int(a)] = tuple(int(ch) for ch in b)
    return PpCertificate(source, target, power, to_target, from_target, name)


def _pairs(text: str) -> list[tuple[str, str]]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"([01]+)\s*(?:->|→|↦)\s*([01]+)", part)
        if not m:
            raise ValueError(f"cannot parse map entry {part!r}")
        out.append((m.group(1), m.group(2)))
    return out


def load_certificate(path: str | Path) -> PpCertificate:
    p = Path(path)
    if not p.exists() and (DATA / p.name).exists():
        p = DATA / p.name
    return parse_certificate(p.read_text(encoding="utf-8"), p.parent, p.stem)


def stcon_to_b2() -> PpCertificate:
    """The shipped certificate: (B2, <=) from the square of D_STCON."""
    return load_certificate(DATA / "stcon_to_b2.cert")


SHIPPED_CERTIFICATES = ("stcon_to_b2",)


def shipped_certificate(name: str) -> PpCertificate:
    if name not in SHIPPED_CERTIFICATES:
        raise KeyError(f"no shipped certificate {name!r}")
    return load_certificate(DATA / f"{name}.cert")
