"""Source database instances and the unified (multi-source) database."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from repairdb.exceptions import SchemaError
from repairdb.logic.terms import Atom, Constant, term_constants
from repairdb.transform.formula import Formula, constants, signatures


def check_schema(atoms: Iterable[Atom], known: dict[str, int] | None = None) -> dict[str, int]:
    """Collect predicate arities, raising :class:`SchemaError` on a clash."""
    schema = {} if known is None else known
    for atom in atoms:
        arity = schema.setdefault(atom.predicate, atom.arity)
        if arity != atom.arity:
            raise SchemaError(f"Predicate {atom.predicate} has arity {arity}, got {atom}.")
    return schema


@dataclass(frozen=True)
class DatabaseInstance:
    """Ground facts of one source.

    Args:
        facts (frozenset[Atom]): Ground facts.
        source_id (str): Identifier of the source.
        timestamps (Mapping[Atom, int]): Time at which a fact was added. Only
            used by the timestamp composer; untimed facts hold initially.
        deletions (tuple[tuple[Atom, int], ...]): Recorded deletion events.
    """

    facts: frozenset[Atom] = frozenset()
    source_id: str = "db"
    timestamps: Mapping[Atom, int] = field(default_factory=dict, hash=False)
    deletions: tuple[tuple[Atom, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "facts", frozenset(self.facts))
        for atom in self.facts:
            if not atom.is_ground():
                raise SchemaError(f"Fact {atom} of source {self.source_id} is not ground.")
        unknown = set(self.timestamps) - self.facts
        if unknown:
            listed = sorted(map(str, unknown))
            raise SchemaError(f"Timestamps given for facts not in source {self.source_id}: {listed}.")
        for atom, time in [*self.timestamps.items(), *self.deletions]:
            if time < 0:
                raise SchemaError(f"Negative timestamp {time} for {atom} in source {self.source_id}.")
            if not atom.is_ground():
                raise SchemaError(f"Event atom {atom} of source {self.source_id} is not ground.")
        check_schema([*self.facts, *(a for a, _ in self.deletions)])

    @classmethod
    def from_atoms(cls, atoms: Iterable[Atom], source_id: str = "db") -> DatabaseInstance:
        return cls(frozenset(atoms), source_id)


def merge_facts(databases: Iterable[DatabaseInstance]) -> frozenset[Atom]:
    """Union of the facts of all sources (duplicates merge)."""
    databases = list(databases)
    check_schema(a for db in databases for a in db.facts)
    return frozenset().union(*(db.facts for db in databases))


def sorted_atoms(atoms: Iterable[Atom]) -> list[Atom]:
    return sorted(atoms, key=str)


@dataclass(frozen=True)
class UnifiedDatabase:
    """``(D, IC)``: the union of the sources' facts with the constraints."""

    facts: frozenset[Atom]
    constraints: tuple[Formula, ...] = ()

    def __post_init__(self):
        schema = check_schema(self.facts)
        for formula in self.constraints:
            for predicate, arity in signatures(formula).items():
                if schema.setdefault(predicate, arity) != arity:
                    raise SchemaError(
                        f"Constraint uses {predicate}/{arity} but the facts fix arity {schema[predicate]}."
                    )

    @classmethod
    def from_instances(
        cls, databases: Iterable[DatabaseInstance], constraints: Iterable[Formula] = ()
    ) -> UnifiedDatabase:
        return cls(merge_facts(databases), tuple(constraints))

    @property
    def schema(self) -> dict[str, int]:
        schema = check_schema(self.facts)
        for formula in self.constraints:
            schema.update({p: a for p, a in signatures(formula).items() if p not in schema})
        return schema

    @property
    def active_domain(self) -> tuple[Constant, ...]:
        found = {c for atom in self.facts for arg in atom.args for c in term_constants(arg)}
        for formula in self.constraints:
            found.update(constants(formula))
        return tuple(sorted(found, key=lambda c: c.name))


@dataclass(frozen=True)
class RepairedDatabase:
    facts: frozenset[Atom]
    constraints: tuple[Formula, ...] = ()
