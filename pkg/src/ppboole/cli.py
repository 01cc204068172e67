"""Command-line entry point: ``ppboole <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .clones import CloneTooLarge, GeneratorSet, closure_at_arity
from .conditions import H1Condition, SatResult, condition_by_name, satisfies_clone, satisfies_structure
from .poset import (
    Classification,
    battery_table,
    classify_generators,
    classify_structure,
    compare,
    complexity_note,
    covers,
    export_dot,
    leq,
    separation_order,
    shipped_battery_table,
    truncation,
    write_battery_table,
)
from .ppcon import load_certificate, verify_certificate
from .reduction import instance_to_dict, load_instance, reduce_instance, validate
from .structures import Structure, load_structure, polymorphisms_at_arity

DISPLAY = {"QNU(3)": "quasi majority", "quasi-minority": "quasi minority", "Comm": "f(x,y)≈f(y,x)"}


class UsageError(Exception):
    pass


@dataclass
class Operand:
    label: str
    structure: Structure | None = None
    clone: GeneratorSet | None = None

    @property
    def kind(self) -> str:
        return "structure" if self.structure is not None else "generators"

    def check(self, cond: H1Condition) -> SatResult:
        if self.structure is not None:
            return satisfies_structure(self.structure, cond)
        return satisfies_clone(self.clone, cond)

    def classify(self, chain_bound: int) -> Classification:
        if self.structure is not None:
            return classify_structure(self.structure)
        return classify_generators(self.clone, chain_bound)


def _structure(ref: str) -> Structure:
    try:
        return load_structure(ref)
    except KeyError:
        raise UsageError(f"no structure file or canonical structure named {ref!r}") from None


def _generators(spec: str) -> GeneratorSet:
    try:
        return GeneratorSet.parse(spec)
    except (KeyError, ValueError) as e:
        raise UsageError(f"bad generator spec {spec!r}: {e}") from None


def _operand(args) -> Operand:
    if args.structure is not None:
        s = _structure(args.structure)
        return Operand(s.name, structure=s)
    g = _generators(args.generators)
    return Operand(g.label, clone=g)


def _free_operand(ref: str) -> Operand:
    """A structure file, a canonical structure name, or a generator spec."""
    try:
        s = load_structure(ref)
        return Operand(s.name, structure=s)
    except KeyError:
        pass
    g = _generators(ref)
    return Operand(g.label, clone=g)


def _emit(args, data: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        for line in lines:
            print(line)


def _witness_lines(r: SatResult, indent: str = "  ") -> list[str]:
    return [f"{indent}{sym} = {f}" for sym, f in (r.witness or {}).items()]


# -- commands ----------------------------------------------------------------------


def cmd_classify(args) -> int:
    op = _operand(args)
    res = op.classify(args.chain_bound)
    data = {"input": op.label, "kind": op.kind, **res.to_dict()}
    if res.cls is None:
        lines = [f"class unresolved ({op.label})"]
    else:
        lines = [f"class {res.cls}, {res.complexity}"]
        if note := complexity_note(res.cls):
            lines.append(f"note: {note}")
            data["complexity_note"] = note
    lines.append(f"battery (chain bound {res.chain_bound}):")
    for name, r in res.outcomes.items():
        lines.append(f"  {name:<16}{r.status:<10}{r.nodes} nodes")
    wit = [(n, r) for n, r in res.outcomes.items() if r.witness]
    if wit:
        lines.append("witnesses:")
        for name, r in wit:
            lines.append(f"  {name}:")
            lines += _witness_lines(r, "    ")
    lines += [f"note: {n}" for n in res.notes]
    _emit(args, data, lines)
    return 0


def _separate(a: Operand, b: Operand, top: int) -> tuple[H1Condition, SatResult, SatResult] | None:
    """A battery condition satisfied by ``a`` and refuted for ``b``."""
    for cond in separation_order(top):
        yes = a.check(cond)
        if not yes:
            continue
        no = b.check(cond)
        if no.refuted:
            return cond, yes, no
    return None


def cmd_compare(args) -> int:
    a, b = _free_operand(args.a), _free_operand(args.b)
    ca, cb = a.classify(args.chain_bound), b.classify(args.chain_bound)
    top = max(ca.chain_bound, cb.chain_bound)
    if ca.cls is None or cb.cls is None:
        relation = "undetermined"
        need_right = need_left = True
    else:
        relation = compare(ca.cls, cb.cls)
        need_right, need_left = not leq(cb.cls, ca.cls), not leq(ca.cls, cb.cls)
    witnesses = []
    # (→): satisfied by the right operand, refuted for the left one; (←) the reverse
    for arrow, need, yes_side, no_side in (("→", need_right, b, a), ("←", need_left, a, b)):
        if not need:
            continue
        sep = _separate(yes_side, no_side, top)
        if sep:
            cond, yes, no = sep
            witnesses.append({"direction": arrow, "condition": cond.name, "holds_nodes": yes.nodes, "refuted_nodes": no.nodes})
    data = {
        "left": {"input": a.label, "class": str(ca.cls) if ca.cls else None},
        "right": {"input": b.label, "class": str(cb.cls) if cb.cls else None},
        "relation": relation,
        "witnesses": witnesses,
    }
    line = relation
    if witnesses:
        line += "; witnesses: " + ", ".join(f"{DISPLAY.get(w['condition'], w['condition'])} ({w['direction']})" for w in witnesses)
    lines = [line, f"  {a.label}: {ca.cls or 'unresolved'}", f"  {b.label}: {cb.cls or 'unresolved'}"]
    _emit(args, data, lines)
    return 0


def cmd_check(args) -> int:
    op = _operand(args)
    try:
        cond = condition_by_name(args.condition)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    if op.structure is not None:
        r = satisfies_structure(op.structure, cond, max_nodes=args.max_nodes)
    else:
        r = satisfies_clone(op.clone, cond, max_nodes=args.max_nodes)
    data = {
        "input": op.label,
        "condition": cond.name,
        "identities": cond.render(),
        "status": r.status,
        "nodes": r.nodes,
        "exhaustive": r.exhaustive,
        "route": r.route,
        "witness": {s: str(f) for s, f in (r.witness or {}).items()},
    }
    if r.witness is not None:
        lines = [f"{cond.name} satisfied in {op.label} ({r.nodes} nodes)"] + _witness_lines(r)
    elif r.exhaustive:
        lines = [f"{cond.name} refuted in {op.label}: exhaustive search, {r.nodes} nodes"]
    else:
        lines = [f"{cond.name} unknown in {op.label}: search stopped after {r.nodes} nodes"]
    _emit(args, data, lines)
    return 0


def _slice_report(args, label: str, sl) -> int:
    tables = [str(f) for f in sl]
    data = {"input": label, "arity": sl.arity, "count": len(tables), "members": tables}
    _emit(args, data, [f"{len(tables)} members of arity {sl.arity}"] + tables)
    return 0


def cmd_closure(args) -> int:
    g = _generators(args.generators)
    return _slice_report(args, g.label, closure_at_arity(g, args.arity))


def cmd_polymorphisms(args) -> int:
    s = _structure(args.structure)
    return _slice_report(args, s.name, polymorphisms_at_arity(s, args.arity))


def cmd_verify_paper(args) -> int:
    from .claims import run_all

    results = run_all(args.only)
    data = {
        "results": [{"name": r.name, "ok": r.ok, "detail": r.detail, "seconds": round(r.seconds, 3)} for r in results],
        "passed": sum(r.ok for r in results),
        "total": len(results),
    }
    lines = [f"{'PASS' if r.ok else 'FAIL'}  {r.name}  ({r.seconds:.2f} s)  {r.detail}" for r in results]
    lines.append(f"{data['passed']}/{data['total']} passed")
    _emit(args, data, lines)
    return 0 if results and data["passed"] == data["total"] else 1


def cmd_export_lattice(args) -> int:
    d = args.chain_depth
    if d < 3:
        raise UsageError("chain depth must be at least 3")
    if args.json:
        nodes = truncation(d)
        cov = covers(d)
        data = {
            "chain_depth": d,
            "nodes": [str(c) for c in nodes],
            "covers": [[str(a), str(b)] for a, b in cov],
            "atoms": [str(b) for a, b in cov if a.tag == "Bottom"],
            "coatoms": [str(a) for a, b in cov if b.tag == "Top"],
        }
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(export_dot(d))
    return 0


def cmd_reduce(args) -> int:
    try:
        cert = load_certificate(args.certificate)
        I, A = load_instance(args.instance)
    except (FileNotFoundError, KeyError) as e:
        raise UsageError(str(e)) from None
    report = verify_certificate(cert)
    if not report:
        print("certificate does not verify:", file=sys.stderr)
        for p in report.problems:
            print(f"  {p}", file=sys.stderr)
        return 1
    if I.signature != cert.target.signature():
        raise UsageError(f"instance structure {A.name} does not match the certificate target {cert.target.name}")
    red = reduce_instance(I, cert, check=False)
    out = instance_to_dict(red.instance, cert.source)
    data = {
        "reduced": out,
        "variable_map": [[v + 1 for v in block] for block in red.variable_map],
        "unsat_marker": red.unsat_marker,
        "notes": red.notes,
    }
    lines = [
        f"reduced {I.variables} variables / {len(I)} constraints over {cert.target.name}"
        f" to {red.instance.variables} / {len(red.instance)} over {cert.source.name}"
    ]
    if red.unsat_marker:
        lines.append("unsatisfiable: " + "; ".join(red.notes))
    if args.output:
        Path(args.output).write_text(json.dumps(out, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        lines.append(f"written to {args.output}")
    else:
        lines.append(json.dumps(out, ensure_ascii=False))
    status = 0
    if args.validate:
        v = validate(cert, args.validate, args.seed)
        data["validation"] = v.to_dict()
        lines.append(
            f"validation (seed {v.seed}): {v.agreements}/{v.instances} agree,"
            f" {v.transported}/{v.satisfiable} solutions transported, max size ratio {v.max_ratio:.2f}"
        )
        lines += [f"  {f}" for f in v.failures]
        status = 0 if v.ok else 1
    _emit(args, data, lines)
    return status


def cmd_battery_table(args) -> int:
    if args.write:
        table = write_battery_table(chain_bound=args.chain_bound)
        _emit(args, table, [f"wrote {len(table['rows'])} rows"])
        return 0
    fresh = battery_table(args.chain_bound)
    shipped = shipped_battery_table()
    diff = sorted(k for k in fresh["rows"].keys() | shipped["rows"].keys() if fresh["rows"].get(k) != shipped["rows"].get(k))
    data = {"rows": len(fresh["rows"]), "mismatches": diff}
    lines = [f"{len(fresh['rows'])} rows regenerated, {len(diff)} mismatches"] + [f"  {k}" for k in diff]
    _emit(args, data, lines)
    return 1 if diff else 0


# -- parser ----------------------------------------------------------------------------


def _input_group(p: argparse.ArgumentParser, structure_only: bool = False) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--structure", metavar="FILE", help="structure JSON file or canonical name (e.g. D_2SAT, blocker(3))")
    if not structure_only:
        g.add_argument("--generators", metavar="SPEC", help='generator spec, e.g. "d3,p" or "3:00010111"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppboole", description="pp-constructability of Boolean structures")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("classify", parents=[common], help="class and complexity of a structure or clone")
    _input_group(p)
    p.add_argument("--chain-bound", type=int, default=6, metavar="K")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("compare", parents=[common], help="order two structures or clones")
    p.add_argument("a", help="structure file, canonical name or generator spec")
    p.add_argument("b")
    p.add_argument("--chain-bound", type=int, default=6, metavar="K")
    p.set_defaults(run=cmd_compare)

    p = sub.add_parser("check", parents=[common], help="decide a height-1 condition")
    p.add_argument("--condition", required=True, metavar="NAME|FILE")
    _input_group(p)
    p.add_argument("--max-nodes", type=int, default=None)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("closure", parents=[common], help="members of a clone at one arity")
    p.add_argument("--generators", required=True, metavar="SPEC")
    p.add_argument("--arity", type=int, required=True, metavar="K")
    p.set_defaults(run=cmd_closure)

    p = sub.add_parser("polymorphisms", parents=[common], help="polymorphisms of a structure at one arity")
    _input_group(p, structure_only=True)
    p.add_argument("--arity", type=int, required=True, metavar="K")
    p.set_defaults(run=cmd_polymorphisms)

    p = sub.add_parser("verify-paper", parents=[common], help="recheck every collapse and separation")
    p.add_argument("--only", default=None, help="run only checks whose name contains this text")
    p.set_defaults(run=cmd_verify_paper)

    p = sub.add_parser("export-lattice", parents=[common], help="Hasse diagram of the truncated lattice")
    p.add_argument("--chain-depth", type=int, default=6, metavar="D")
    p.add_argument("--format", choices=("dot",), default="dot")
    p.set_defaults(run=cmd_export_lattice)

    p = sub.add_parser("reduce", parents=[common], help="reduce a CSP instance along a certificate")
    p.add_argument("--certificate", required=True, metavar="FILE")
    p.add_argument("--instance", required=True, metavar="FILE")
    p.add_argument("--output", metavar="FILE")
    p.add_argument("--validate", type=int, default=0, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="S")
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("battery-table", parents=[common], help="regenerate the catalog decision table")
    p.add_argument("--chain-bound", type=int, default=8, metavar="K")
    p.add_argument("--write", action="store_true", help="overwrite the shipped table")
    p.set_defaults(run=cmd_battery_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "arity", 1) is not None and getattr(args, "arity", 1) < 1:
        print("error: arity must be positive", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (CloneTooLarge, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
