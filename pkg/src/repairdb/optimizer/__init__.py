"""Preference criteria and the branch-and-bound repair search."""

from repairdb.optimizer.criteria import PreferenceCriterion, is_preferred, leq, preferred_subset, strictly_better
from repairdb.optimizer.frontier import Frontier
from repairdb.optimizer.search import (
    BUDGET_EXHAUSTED,
    COMPLETE,
    FLOUNDERED,
    RepairSearch,
    SearchResult,
    preferred_repairs,
    prune_cardinality,
    prune_inclusion,
)

__all__ = [
    "BUDGET_EXHAUSTED",
    "COMPLETE",
    "FLOUNDERED",
    "Frontier",
    "PreferenceCriterion",
    "RepairSearch",
    "SearchResult",
    "is_preferred",
    "leq",
    "preferred_repairs",
    "preferred_subset",
    "prune_cardinality",
    "prune_inclusion",
    "strictly_better",
]
