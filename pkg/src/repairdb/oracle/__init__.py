"""Brute-force repair oracle over three-valued models."""

from repairdb.oracle.repairs import (
    ModelOracle,
    all_repairs_oracle,
    direct_repairs,
    dist,
    maximally_consistent,
    mdb_elements,
    mdb_generators,
    mdb_min_elements,
    more_consistent,
    preferred_repairs_oracle,
    repair_from_join,
    repair_from_model,
)
from repairdb.oracle.truth import TruthValue, join, k_leq, t_leq
from repairdb.oracle.valuation import (
    AtomUniverse,
    Valuation,
    denial_theory_holds,
    eval3,
    herbrand_min_model,
    knowledge_join,
    models_frame,
    satisfies,
    two_valued_models,
)

__all__ = [
    "AtomUniverse",
    "ModelOracle",
    "TruthValue",
    "Valuation",
    "all_repairs_oracle",
    "denial_theory_holds",
    "direct_repairs",
    "dist",
    "eval3",
    "herbrand_min_model",
    "join",
    "k_leq",
    "knowledge_join",
    "maximally_consistent",
    "mdb_elements",
    "mdb_generators",
    "mdb_min_elements",
    "models_frame",
    "more_consistent",
    "preferred_repairs_oracle",
    "repair_from_join",
    "repair_from_model",
    "satisfies",
    "t_leq",
    "two_valued_models",
]
