"""Analysis toolkit for finite idempotent algebras and minimal Taylor clones."""

from .absorption import absorbs, is_n_absorbing, min_taylor_2abs, min_taylor_3abs
from .catalogue import canonicalize, enumerate_minimal_taylor, same_class
from .classify import (four_types, omitting_types, produce_majority_term,
                       produce_semilattice_block, theorem_suite)
from .clone import (find_term, generates_clone, is_minimal_taylor, is_taylor,
                    unified_operation)
from .core import Algebra, Relation, load_algebra
from .edges import classify_pair, edge_graph
from .errors import ArgumentError, PreconditionError, ResourceError
from .terms import Term, parse_term

__all__ = [
    "Algebra", "Relation", "Term", "load_algebra", "parse_term",
    "ArgumentError", "PreconditionError", "ResourceError",
    "is_taylor", "is_minimal_taylor", "find_term", "generates_clone", "unified_operation",
    "absorbs", "is_n_absorbing", "min_taylor_2abs", "min_taylor_3abs",
    "classify_pair", "edge_graph",
    "four_types", "omitting_types", "produce_majority_term", "produce_semilattice_block",
    "theorem_suite", "canonicalize", "enumerate_minimal_taylor", "same_class",
]
