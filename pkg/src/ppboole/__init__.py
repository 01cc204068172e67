"""pp-constructability of Boolean structures: clones, height-1 conditions,
classification into the lattice of pp-constructability classes, and
CSP reductions along pp-construction certificates."""

from .boolfn import BoolFn, IndexMap, compose, dual, is_idempotent, minor, named
from .clones import GeneratorSet, catalog, closure_at_arity, contains, dual_clone, verify_minor_map
from .conditions import H1Condition, condition_by_name, parse_condition, satisfies_clone, satisfies_structure
from .poset import PosetClass, classify_generators, classify_structure, leq, separating_condition
from .ppcon import PpCertificate, load_certificate, verify_certificate
from .reduction import CspInstance, reduce_instance, validate
from .structures import Relation, Structure, canonical, load_structure, polymorphisms_at_arity, preserves

__version__ = "0.1.0"

__all__ = [
    "BoolFn", "IndexMap", "compose", "dual", "is_idempotent", "minor", "named",
    "GeneratorSet", "catalog", "closure_at_arity", "contains", "dual_clone", "verify_minor_map",
    "H1Condition", "condition_by_name", "parse_condition", "satisfies_clone", "satisfies_structure",
    "PosetClass", "classify_generators", "classify_structure", "leq", "separating_condition",
    "PpCertificate", "load_certificate", "verify_certificate",
    "CspInstance", "reduce_instance", "validate",
    "Relation", "Structure", "canonical", "load_structure", "polymorphisms_at_arity", "preserves",
]
