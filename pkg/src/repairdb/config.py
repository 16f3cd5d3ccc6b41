"""Run configuration.

The library only takes these objects; flags and ``option`` lines of problem
files are mapped onto them by the frontend.
"""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, PositiveInt


class PreferenceCriterion(str, Enum):
    """Pre-orders on repairs: set inclusion or cardinality of Insert ∪ Retract."""

    INCLUSION = "inclusion"
    CARDINALITY = "cardinality"


class SearchBudget(BaseModel):
    """Limits of one derivation.

    Args:
        max_steps (int): Maximal number of rule applications.
        max_delta (int): Maximal number of abduced atoms on a branch.
    """

    model_config = ConfigDict(frozen=True)

    max_steps: PositiveInt = 200_000
    max_delta: PositiveInt = 12


class RunOptions(BaseModel):
    """Everything a run of the pipeline can be configured with."""

    model_config = ConfigDict(frozen=True)

    criterion: PreferenceCriterion = PreferenceCriterion.INCLUSION
    sources: bool = False
    timestamps: bool = False
    budget: SearchBudget = Field(default_factory=SearchBudget)
    reuse_first: bool = True
    workers: PositiveInt = 1
    ground: bool = False
    all_repairs: bool = False
    only_sources: tuple[str, ...] | None = None
    oracle_cap: PositiveInt = 16
    oracle_fresh_constant: bool = False

    def merged(self, **overrides) -> RunOptions:
        """A copy with the non-``None`` overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return self.model_copy(update=changes)
