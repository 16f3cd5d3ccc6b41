"""The abductive derivation engine."""

from repairdb.engine.derive import (
    Derivation,
    DeterministicFirst,
    Leftmost,
    ReplaySelector,
    Selector,
    answer_substitutions,
    derive,
    deterministic_first,
    fresh_constant,
    select_goal,
    select_leftmost,
)
from repairdb.engine.goals import (
    BudgetExhausted,
    DerivationOutcome,
    Failure,
    Floundered,
    GoalFormula,
    PositiveGoal,
    Solution,
    State,
    Store,
)
from repairdb.engine.rules import (
    Expansion,
    Rules,
    apply_rule_abducible,
    apply_rule_defined,
    apply_rule_equality,
    apply_rule_negation,
)
from repairdb.engine.trace import TraceRecord, TraceRecorder, read_trace

__all__ = [
    "BudgetExhausted",
    "Derivation",
    "DerivationOutcome",
    "DeterministicFirst",
    "Expansion",
    "Failure",
    "Floundered",
    "GoalFormula",
    "Leftmost",
    "PositiveGoal",
    "ReplaySelector",
    "Rules",
    "Selector",
    "Solution",
    "State",
    "Store",
    "TraceRecord",
    "TraceRecorder",
    "answer_substitutions",
    "apply_rule_abducible",
    "apply_rule_defined",
    "apply_rule_equality",
    "apply_rule_negation",
    "derive",
    "deterministic_first",
    "fresh_constant",
    "read_trace",
    "select_goal",
    "select_leftmost",
]
