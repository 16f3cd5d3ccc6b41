"""Integrity constraints as formulas and their translation into denials."""

from repairdb.transform.formula import (
    FALSE,
    TRUE,
    And,
    Compare,
    Equals,
    Exists,
    ForAll,
    Formula,
    Implies,
    Not,
    Or,
    Pred,
    Truth,
)
from repairdb.transform.lloyd_topor import (
    DenialTheory,
    check_non_recursive,
    guard_unsafe,
    lloyd_topor,
    lloyd_topor_all,
    rewrite_fact_level,
)

__all__ = [
    "FALSE",
    "TRUE",
    "And",
    "Compare",
    "DenialTheory",
    "Equals",
    "Exists",
    "ForAll",
    "Formula",
    "Implies",
    "Not",
    "Or",
    "Pred",
    "Truth",
    "check_non_recursive",
    "guard_unsafe",
    "lloyd_topor",
    "lloyd_topor_all",
    "rewrite_fact_level",
]
