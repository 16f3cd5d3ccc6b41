"""Repairs: from abductive solutions to (Insert, Retract) pairs and back to databases."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from repairdb.composer.database import DatabaseInstance, RepairedDatabase, UnifiedDatabase, merge_facts
from repairdb.exceptions import SubstitutionError
from repairdb.logic.store import EMPTY_STORE, Disequality, EqualityStore
from repairdb.logic.terms import Atom, Term, Variable, term_to_atom
from repairdb.logic.unify import EMPTY, Substitution

TIMED_ACTION = "at"


def _placeholder(atom: Atom) -> str:
    # rendering with variables blanked, so ordering ignores variable names
    return str(atom.substitute({name: Variable("_") for name in atom.variables()}))


@dataclass(frozen=True)
class Repair:
    """A pair (Insert, Retract), possibly non-ground.

    A non-ground repair stands for every grounding of its variables that
    satisfies ``residual_constraints``.
    """

    insert: frozenset[Atom] = frozenset()
    retract: frozenset[Atom] = frozenset()
    residual_constraints: tuple[Disequality, ...] = ()

    @property
    def size(self) -> int:
        return len(self.insert) + len(self.retract)

    @property
    def is_ground(self) -> bool:
        return all(atom.is_ground() for atom in self.insert | self.retract)

    def variables(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for atom in [*sorted(self.insert, key=_placeholder), *sorted(self.retract, key=_placeholder)]:
            for name in atom.variables():
                seen.setdefault(name, None)
        return tuple(seen)

    def canonical(self) -> Repair:
        """Rename variables to ``_V1, _V2, ...`` in order of appearance."""
        renaming: dict[str, Term] = {name: Variable(f"_V{i}") for i, name in enumerate(self.variables(), start=1)}
        residual = []
        for entry in self.residual_constraints:
            local = {name: Variable(f"_U{i}") for i, name in enumerate(sorted(entry.universal_vars), start=1)}
            renamed = entry.substitute({**renaming, **local})
            residual.append(Disequality(frozenset(v.name for v in local.values()), renamed.lhs, renamed.rhs))
        return Repair(
            frozenset(a.substitute(renaming) for a in self.insert),
            frozenset(a.substitute(renaming) for a in self.retract),
            tuple(sorted(set(residual), key=str)),
        )

    def key(self) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
        """Normalized syntactic identity, used for deduplication and ordering."""
        canonical = self.canonical()
        return (
            tuple(sorted(map(str, canonical.insert))),
            tuple(sorted(map(str, canonical.retract))),
            tuple(str(d) for d in canonical.residual_constraints),
        )

    def __str__(self) -> str:
        canonical = self.canonical()
        insert = ", ".join(sorted(map(str, canonical.insert)))
        retract = ", ".join(sorted(map(str, canonical.retract)))
        text = f"({{{insert}}}, {{{retract}}})"
        if canonical.residual_constraints:
            text += " where " + ", ".join(str(d) for d in canonical.residual_constraints)
        return text


def solution_to_repair(delta: Iterable[Atom], store: EqualityStore = EMPTY_STORE, timestamped: bool = False) -> Repair:
    """Strip the ``insert``/``retract`` wrappers of an abductive solution.

    Args:
        delta (Iterable[Atom]): Abduced atoms.
        store (EqualityStore): Equality store of the solution state.
        timestamped (bool): Whether the abducibles carry a time argument; the
            actions are then reported as ``at(<fact>, <time>)``.

    Returns:
        Repair: The repair with the disequalities that mention its variables.
    """
    insert: set[Atom] = set()
    retract: set[Atom] = set()
    for raw in delta:
        atom = Atom(raw.predicate, tuple(store.resolve(a) for a in raw.args))
        if atom.predicate == "insert":
            target = insert
        elif atom.predicate == "retract":
            target = retract
        else:
            raise ValueError(f"Abduced atom {atom} is neither insert nor retract.")
        if timestamped:
            target.add(Atom(TIMED_ACTION, atom.args))
        else:
            target.add(term_to_atom(atom.args[0]))
    repair = Repair(frozenset(insert), frozenset(retract))
    names = set(repair.variables())
    residual = tuple(d for d in store.disequalities if d.free_vars & names)
    return Repair(repair.insert, repair.retract, residual)


def ground_repair(repair: Repair, grounding: Substitution) -> Repair:
    """Instantiate ``repair``; the grounding must satisfy its residual constraints."""
    insert = frozenset(a.substitute(grounding) for a in repair.insert)
    retract = frozenset(a.substitute(grounding) for a in repair.retract)
    if not all(a.is_ground() for a in insert | retract):
        raise SubstitutionError(f"Grounding {grounding} leaves variables in {repair}.")
    store: EqualityStore | None = EMPTY_STORE
    for entry in repair.residual_constraints:
        entry = entry.substitute(grounding)
        store = store.add_disequality(entry.universal_vars, entry.lhs, entry.rhs)
        if store is None:
            raise SubstitutionError(f"Grounding {grounding} violates the residual constraint {entry}.")
    return Repair(insert, retract)


def apply_repair(
    db: Iterable[DatabaseInstance] | UnifiedDatabase,
    repair: Repair,
    grounding: Substitution = EMPTY,
) -> RepairedDatabase:
    """``(D ∪ Insert) \\ Retract`` for a grounding of ``repair``."""
    if isinstance(db, UnifiedDatabase):
        facts, constraints = db.facts, db.constraints
    else:
        facts, constraints = merge_facts(db), ()
    ground = ground_repair(repair, grounding)
    return RepairedDatabase((facts | ground.insert) - ground.retract, constraints)
