"""Syntax of the logic language, unification and the equality store."""

from repairdb.logic.store import (
    EMPTY_STORE,
    Disequality,
    EqualityStore,
    store_add_disequality,
    store_add_equality,
)
from repairdb.logic.terms import (
    Atom,
    BodyLiteral,
    Clause,
    Comparison,
    Compound,
    Constant,
    Denial,
    Equality,
    Literal,
    Term,
    Variable,
    atom_to_term,
    term_to_atom,
)
from repairdb.logic.unify import EMPTY, Substitution, apply, unify, unify_pairs

__all__ = [
    "EMPTY",
    "EMPTY_STORE",
    "Atom",
    "BodyLiteral",
    "Clause",
    "Comparison",
    "Compound",
    "Constant",
    "Denial",
    "Disequality",
    "Equality",
    "EqualityStore",
    "Literal",
    "Substitution",
    "Term",
    "Variable",
    "apply",
    "atom_to_term",
    "store_add_disequality",
    "store_add_equality",
    "term_to_atom",
    "unify",
    "unify_pairs",
]
