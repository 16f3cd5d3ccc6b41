"""Machine-readable results of a run."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from typing import Literal

import pandas as pd
from pydantic import BaseModel, ConfigDict

from repairdb.composer.repair import Repair
from repairdb.logic.unify import Substitution

Status = Literal["complete", "budget_exhausted", "floundered"]


class RepairRecord(BaseModel):
    """One repair in canonical form; free variables are named ``_V1, _V2, ...``."""

    model_config = ConfigDict(frozen=True)

    insert: list[str]
    retract: list[str]
    where: list[str] = []
    groundings: list[dict[str, str]] | None = None

    @classmethod
    def from_repair(cls, repair: Repair, groundings: Iterable[Substitution] | None = None) -> RepairRecord:
        canonical = repair.canonical()
        renaming = dict(zip(repair.variables(), canonical.variables()))
        rows = None
        if groundings is not None:
            rows = [{renaming[k]: str(v) for k, v in sorted(g.items()) if k in renaming} for g in groundings]
            rows.sort(key=lambda row: sorted(row.items()))
        return cls(
            insert=sorted(map(str, canonical.insert)),
            retract=sorted(map(str, canonical.retract)),
            where=[str(d) for d in canonical.residual_constraints],
            groundings=rows,
        )

    def __str__(self) -> str:
        text = f"({{{', '.join(self.insert)}}}, {{{', '.join(self.retract)}}})"
        if self.where:
            text += " where " + ", ".join(self.where)
        return text


class SearchStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    steps: int = 0
    solutions: int = 0
    pruned: int = 0
    floundered: int = 0
    models: int | None = None


class RepairReport(BaseModel):
    """Repairs, completeness status and search statistics.

    ``status`` is ``complete`` when the whole search space was explored;
    with ``budget_exhausted`` or ``floundered`` the repairs are the best found.
    """

    model_config = ConfigDict(frozen=True)

    repairs: list[RepairRecord]
    status: Status = "complete"
    stats: SearchStats = SearchStats()
    floundered: list[str] | None = None

    @classmethod
    def from_repairs(
        cls,
        repairs: Sequence[Repair],
        status: Status = "complete",
        stats: SearchStats | None = None,
        floundered: Iterable[object] = (),
        groundings: Mapping[tuple, list[Substitution]] | None = None,
    ) -> RepairReport:
        """Canonically ordered report; ``groundings`` is keyed by :meth:`Repair.key`."""
        ordered = sorted({r.key(): r for r in repairs}.values(), key=Repair.key)
        records = [
            RepairRecord.from_repair(r, None if groundings is None else groundings.get(r.key())) for r in ordered
        ]
        goals = sorted({str(g) for g in floundered})
        return cls(repairs=records, status=status, stats=stats or SearchStats(), floundered=goals or None)

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    def keys(self) -> list[tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]]:
        return [(tuple(r.insert), tuple(r.retract), tuple(r.where)) for r in self.repairs]

    def to_json(self) -> str:
        """Compact JSON; identical input gives identical bytes."""
        return self.model_dump_json(exclude_none=True)

    def to_frame(self) -> pd.DataFrame:
        """One row per repair."""
        rows = [
            {
                "insert": ", ".join(r.insert),
                "retract": ", ".join(r.retract),
                "where": ", ".join(r.where),
                "size": len(r.insert) + len(r.retract),
            }
            for r in self.repairs
        ]
        return pd.DataFrame(rows, columns=["insert", "retract", "where", "size"])

    def to_text(self) -> str:
        lines = [f"status: {self.status}", f"repairs: {len(self.repairs)}"]
        for i, record in enumerate(self.repairs, start=1):
            lines.append(f"  {i}. {record}")
            for grounding in record.groundings or []:
                lines.append("       " + ", ".join(f"{k} = {v}" for k, v in grounding.items()))
        for goal in self.floundered or []:
            lines.append(f"floundered on: {goal}")
        stats = self.stats
        summary = f"steps: {stats.steps}, solutions: {stats.solutions}, pruned: {stats.pruned}"
        summary += f", floundered: {stats.floundered}"
        if stats.models is not None:
            summary += f", models: {stats.models}"
        lines.append(summary)
        return "\n".join(lines)
