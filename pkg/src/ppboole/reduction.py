"""CSP instances, their reduction along a pp-construction certificate, and a
brute-force solver used to validate equisatisfiability."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .ppcon import PpCertificate, verify_certificate
from .structures import Structure, load_structure, structure_from_dict, structure_to_dict

MAX_SOLVER_VARIABLES = 24


@dataclass(frozen=True)
class CspInstance:
    signature: dict[str, int]
    variables: int
    constraints: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple((r, tuple(a)) for r, a in self.constraints))
        for rel, args in self.constraints:
            if rel not in self.signature:
                raise ValueError(f"constraint uses unknown relation {rel!r}")
            if len(args) != self.signature[rel]:
                raise ValueError(f"constraint {rel}{args}: arity {self.signature[rel]} expected")
            for v in args:
                if not 0 <= v < self.variables:
                    raise ValueError(f"variable {v + 1} out of range 1..{self.variables}")

    def __len__(self) -> int:
        return len(self.constraints)


def instance_to_dict(I: CspInstance, structure: Structure | str) -> dict[str, Any]:
    ref = structure if isinstance(structure, str) else structure_to_dict(structure)
    return {
        "structure": ref,
        "variables": I.variables,
        "constraints": [[r, [v + 1 for v in args]] for r, args in I.constraints],
    }


def instance_from_dict(data: dict[str, Any], base: Path | None = None) -> tuple[CspInstance, Structure]:
    ref = data["structure"]
    if isinstance(ref, dict):
        A = structure_from_dict(ref)
    elif base is not None and (base / ref).exists():
        A = load_structure(base / ref)
    else:
        A = load_structure(ref)
    cons = tuple((r, tuple(int(v) - 1 for v in args)) for r, args in data.get("constraints", []))
    return CspInstance(A.signature(), int(data["variables"]), cons), A


def load_instance(path: str | Path) -> tuple[CspInstance, Structure]:
    p = Path(path)
    return instance_from_dict(json.loads(p.read_text(encoding="utf-8")), p.parent)


# -- solving ----------------------------------------------------------------------------


def solve_bruteforce(I: CspInstance, A: Structure) -> tuple | None:
    """A satisfying assignment (one value per variable) or ``None``."""
    if I.signature != A.signature():
        raise ValueError("instance signature does not match the structure")
    if I.variables > MAX_SOLVER_VARIABLES:
        raise ValueError(f"{I.variables} variables exceeds the solver limit {MAX_SOLVER_VARIABLES}")
    due: list[list[tuple[frozenset, tuple[int, ...]]]] = [[] for _ in range(I.variables)]
    for rel, args in I.constraints:
        tuples = A.relation(rel).tuples
        if not args:
            if () not in tuples:
                return None
            continue
        due[max(args)].append((tuples, args))
    val: list = [None] * I.variables

    def go(i):
        if i == I.variables:
            return True
        for x in A.domain:
            val[i] = x
            if all(tuple(val[a] for a in args) in tuples for tuples, args in due[i]):
                if go(i + 1):
                    return True
        val[i] = None
        return False

    return tuple(val) if go(0) else None


def satisfies(assignment: Sequence, I: CspInstance, A: Structure) -> bool:
    return all(tuple(assignment[v] for v in args) in A.relation(r).tuples for r, args in I.constraints)


# -- reduction ---------------------------------------------------------------------------


@dataclass
class Reduction:
    instance: CspInstance
    variable_map: list[tuple[int, ...]]
    unsat_marker: bool = False
    notes: list[str] = field(default_factory=list)


def reduce_instance(I: CspInstance, cert: PpCertificate, check: bool = True) -> Reduction:
    """Rewrite an instance over the target into one over the source.

    Every target variable becomes ``n`` source variables, every constraint
    the atoms of its defining formula (with fresh variables for the
    existential ones).  Equalities merge variables.
    """
    if check:
        report = verify_certificate(cert)
        if not report:
            raise ValueError("certificate does not verify: " + "; ".join(report.problems))
    if I.signature != cert.target.signature():
        raise ValueError("instance signature does not match the certificate target")
    n = cert.power.dimension
    formulas = {name: phi for name, _, phi in cert.power.formulas}
    parent = list(range(I.variables * n))

    def fresh():
        parent.append(len(parent))
        return len(parent) - 1

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    raw: list[tuple[str, tuple[int, ...]]] = []
    for rel, args in I.constraints:
        phi = formulas[rel]
        local = [args[j // n] * n + j % n for j in range(phi.free_vars)]
        local += [fresh() for _ in range(phi.existential_vars)]
        for r, a in phi.atoms:
            raw.append((r, tuple(local[v] for v in a)))
        for a, b in phi.equalities:
            ra, rb = find(local[a]), find(local[b])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    reps = sorted({find(x) for x in range(len(parent))})
    index = {r: i for i, r in enumerate(reps)}
    cons = []
    seen = set()
    for r, a in raw:
        c = (r, tuple(index[find(x)] for x in a))
        if c not in seen:
            seen.add(c)
            cons.append(c)
    out = CspInstance(cert.source.signature(), len(reps), tuple(cons))
    vmap = [tuple(index[find(v * n + j)] for j in range(n)) for v in range(I.variables)]
    red = Reduction(out, vmap)
    # singleton constraints that disagree on one (merged) variable
    singles: dict[int, set] = {}
    for r, a in cons:
        rel = cert.source.relation(r)
        if rel.arity == 1 and len(rel.tuples) == 1:
            singles.setdefault(a[0], set()).add(next(iter(rel.tuples))[0])
    clash = sorted(v for v, vals in singles.items() if len(vals) > 1)
    if clash:
        red.unsat_marker = True
        red.notes.append(f"variable {clash[0] + 1} is forced to two different constants")
    return red


def transport(solution: Sequence, red: Reduction, cert: PpCertificate) -> tuple:
    """Map a source solution back through the certificate's power-to-target map."""
    return tuple(cert.hom_to_target[tuple(solution[s] for s in block)] for block in red.variable_map)


# -- validation ----------------------------------------------------------------------------


def random_instance(
    A: Structure, rng: random.Random, max_variables: int = 8, max_constraints: int = 10
) -> CspInstance:
    nv = rng.randint(1, max_variables)
    rels = list(A.relations)
    cons = []
    for _ in range(rng.randint(0, max_constraints)):
        r = rng.choice(rels)
        cons.append((r.name, tuple(rng.randrange(nv) for _ in range(r.arity))))
    return CspInstance(A.signature(), nv, tuple(cons))


@dataclass
class ValidationReport:
    seed: int
    instances: int = 0
    agreements: int = 0
    satisfiable: int = 0
    transported: int = 0
    max_ratio: float = 0.0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.agreements == self.instances and self.transported == self.satisfiable

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "instances": self.instances,
            "agreements": self.agreements,
            "satisfiable": self.satisfiable,
            "transported": self.transported,
            "max_size_ratio": self.max_ratio,
            "failures": self.failures,
            "ok": self.ok,
        }


def validate(cert: PpCertificate, count: int = 100, seed: int = 0, max_variables: int = 8, max_constraints: int = 10) -> ValidationReport:
    """Reduce ``count`` random target instances and compare satisfiability."""
    report = verify_certificate(cert)
    if not report:
        raise ValueError("certificate does not verify: " + "; ".join(report.problems))
    rng = random.Random(seed)
    rep = ValidationReport(seed)
    for i in range(count):
        I = random_instance(cert.target, rng, max_variables, max_constraints)
        red = reduce_instance(I, cert, check=False)
        a = solve_bruteforce(I, cert.target)
        b = solve_bruteforce(red.instance, cert.source)
        rep.instances += 1
        size = len(I) + I.variables
        rep.max_ratio = max(rep.max_ratio, (len(red.instance) + red.instance.variables) / size)
        if (a is None) != (b is None):
            rep.failures.append(f"instance {i}: target {'sat' if a else 'unsat'}, reduced {'sat' if b else 'unsat'}")
            continue
        rep.agreements += 1
        if b is not None:
            rep.satisfiable += 1
            back = transport(b, red, cert)
            if satisfies(back, I, cert.target):
                rep.transported += 1
            else:
                rep.failures.append(f"instance {i}: transported solution violates a constraint")
    return rep
