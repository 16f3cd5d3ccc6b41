"""Composers: abductive meta-theories whose solutions are database repairs.

Three variants share one output type, :class:`AbductiveTheory`:

* :func:`compose` integrates plain databases,
* :func:`compose_with_sources` keeps the origin of every fact and can prefer
  more trusted sources,
* :func:`compose_with_timestamps` describes the databases by add/delete
  events in an event calculus.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from repairdb.composer.database import DatabaseInstance, merge_facts, sorted_atoms
from repairdb.exceptions import SchemaError
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
    body_variables,
    integer,
)
from repairdb.transform.lloyd_topor import DenialTheory, check_non_recursive

logger = logging.getLogger(__name__)

ABDUCIBLES = frozenset({"insert", "retract"})
COMPOSER_SOURCE = "composer"

X, S, S0, A, A0 = (Variable(n) for n in ("X", "S", "S0", "A", "A0"))
P, T, E, C, NT = (Variable(n) for n in ("P", "T", "E", "C", "NT"))


def _atom(predicate: str, *args: Term) -> Atom:
    return Atom(predicate, tuple(args))


def _pos(predicate: str, *args: Term) -> Literal:
    return Literal(_atom(predicate, *args))


def _neg(predicate: str, *args: Term) -> Literal:
    return Literal(_atom(predicate, *args), positive=False)


def _denial(*body: BodyLiteral) -> Denial:
    return Denial(frozenset(body_variables(body)), tuple(body))


@dataclass(frozen=True)
class AbductiveTheory:
    """``(P, A, IC)``: a non-recursive program, abducible predicates and denials.

    Args:
        program (tuple[Clause, ...]): Clauses, facts included.
        abducibles (frozenset[str]): Abducible predicate names; never defined by a clause head.
        constraints (tuple[Denial, ...]): Integrity constraints in denial form.
        declared (frozenset[str]): Predicates that may be used without clauses
            (they are simply false).
        timestamped (bool): Whether abducibles carry a time argument.
    """

    program: tuple[Clause, ...] = ()
    abducibles: frozenset[str] = ABDUCIBLES
    constraints: tuple[Denial, ...] = ()
    declared: frozenset[str] = frozenset()
    timestamped: bool = False
    _index: dict[str, tuple[Clause, ...]] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        index: dict[str, list[Clause]] = {}
        for clause in self.program:
            if clause.head.predicate in self.abducibles:
                raise SchemaError(f"Abducible predicate {clause.head.predicate} appears in the head of {clause}.")
            index.setdefault(clause.head.predicate, []).append(clause)
        self._index.update({k: tuple(v) for k, v in index.items()})

        known = set(index) | self.abducibles | self.declared
        bodies = [lit for c in self.program for lit in c.body] + [lit for d in self.constraints for lit in d.body]
        for lit in bodies:
            if isinstance(lit, Literal) and lit.atom.predicate not in known:
                raise SchemaError(f"Predicate {lit.atom.predicate} is neither defined, declared nor abducible.")
        check_non_recursive(c for c in self.program if c.body)

    def clauses_for(self, predicate: str) -> tuple[Clause, ...]:
        return self._index.get(predicate, ())

    def is_abducible(self, predicate: str) -> bool:
        return predicate in self.abducibles

    @property
    def defined_predicates(self) -> frozenset[str]:
        return frozenset(self._index)

    def listing(self) -> str:
        """The theory in surface syntax, clauses first, one item per line."""
        return "\n".join([str(c) for c in self.program] + [str(d) for d in self.constraints])


def _composer_denials_base() -> tuple[Denial, ...]:
    return (
        _denial(_pos("insert", X), _pos("db", X)),
        _denial(_pos("retract", X), _neg("db", X)),
    )


def compose(databases: Iterable[DatabaseInstance], ics: DenialTheory = DenialTheory()) -> AbductiveTheory:
    """The basic composer.

    ``fact(X)`` holds for stored facts that are not retracted and for inserted
    ones; ``insert`` and ``retract`` are the only abducibles.

    Args:
        databases (Iterable[DatabaseInstance]): The sources; duplicates merge.
        ics (DenialTheory): Constraints already rewritten to ``fact/1`` level.

    Returns:
        AbductiveTheory: The meta-theory.
    """
    facts = merge_facts(databases)
    program = [Clause(_atom("db", atom_to_term(f))) for f in sorted_atoms(facts)]
    program += [
        Clause(_atom("fact", X), (_pos("db", X), _neg("retract", X))),
        Clause(_atom("fact", X), (_pos("insert", X),)),
    ]
    program += ics.auxiliary_clauses
    theory = AbductiveTheory(
        tuple(program),
        ABDUCIBLES,
        ics.denials + _composer_denials_base(),
        declared=frozenset({"db"}) | ics.fresh_predicates,
    )
    logger.debug("composed %d facts into %d clauses, %d denials", len(facts), len(program), len(theory.constraints))
    return theory


def _fresh_variable(base: str, taken: set[str]) -> Variable:
    name = base
    suffix = 0
    while name in taken:
        suffix += 1
        name = f"{base}{suffix}"
    taken.add(name)
    return Variable(name)


def trust_denials(denial: Denial) -> list[Denial]:
    """Specialize the trust preference to a conflict-defining denial.

    For every ordered pair of positive ``fact/1`` literals ``fact(t1)``,
    ``fact(t2)`` the result contains
    ``<- fact(t1, S) & db(t2, S0) & S != S0 & more_trusted(S0, S) & rest``:
    a fact may not survive from ``S`` when it conflicts with a stored fact of
    a more trusted source ``S0``.
    """
    positions = [
        i
        for i, lit in enumerate(denial.body)
        if isinstance(lit, Literal) and lit.positive and lit.atom.predicate == "fact" and lit.atom.arity == 1
    ]
    taken = set(body_variables(denial.body))
    src, src0 = _fresh_variable("S", taken), _fresh_variable("S0", taken)
    result = []
    for i in positions:
        for j in positions:
            if i == j:
                continue
            rest = [lit for k, lit in enumerate(denial.body) if k not in (i, j)]
            body = (
                _pos("fact", denial.body[i].atom.args[0], src),
                _pos("db", denial.body[j].atom.args[0], src0),
                Equality(src, src0, positive=False),
                _pos("more_trusted", src0, src),
                *rest,
            )
            result.append(_denial(*body))
    return result


def compose_with_sources(
    databases: Iterable[DatabaseInstance],
    ics: DenialTheory = DenialTheory(),
    trust: Mapping[str, int] | None = None,
    trusted_sources: Iterable[str] | None = None,
) -> AbductiveTheory:
    """The source-annotated composer.

    Every stored fact becomes ``db(X, S)`` with ``S`` its source; the composer
    is the source of inserted facts. With ``trust`` the conflict-defining
    denials (two positive fact literals) are complemented by trust preference
    denials, so facts of less trusted sources give way. With
    ``trusted_sources`` only those sources (and the composer) contribute to
    ``fact/1``.

    Args:
        databases (Iterable[DatabaseInstance]): The sources.
        ics (DenialTheory): Constraints rewritten to ``fact/1`` level.
        trust (Mapping[str, int], optional): Reliability level per source id.
        trusted_sources (Iterable[str], optional): Sources kept by the filter.

    Raises:
        SchemaError: For trust levels or filters naming unknown sources, or a
            source called like the composer.
    """
    databases = list(databases)
    merge_facts(databases)
    known = {db.source_id for db in databases}
    if COMPOSER_SOURCE in known:
        raise SchemaError(f"Source id {COMPOSER_SOURCE!r} is reserved for inserted facts.")
    trust = dict(trust or {})
    unknown = sorted(set(trust) - known)
    if unknown:
        raise SchemaError(f"Trust levels given for unknown sources: {unknown}.")
    filtered = None if trusted_sources is None else sorted(set(trusted_sources))
    if filtered is not None and set(filtered) - known:
        raise SchemaError(f"Unknown trusted sources: {sorted(set(filtered) - known)}.")

    stored = sorted({(str(f), f, db.source_id) for db in databases for f in db.facts})
    program = [Clause(_atom("db", atom_to_term(f), Constant(s))) for _, f, s in stored]
    program += [Clause(_atom("trust", Constant(s), integer(level))) for s, level in sorted(trust.items())]
    program += [
        Clause(_atom("fact", X, S), (_pos("db", X, S), _neg("retract", X))),
        Clause(_atom("fact", X, Constant(COMPOSER_SOURCE)), (_pos("insert", X),)),
        Clause(_atom("stored", X), (_pos("db", X, S),)),
        Clause(
            _atom("more_trusted", S0, S),
            (_pos("trust", S0, A0), _pos("trust", S, A), Comparison(">", A0, A)),
        ),
    ]
    if filtered is None:
        program.append(Clause(_atom("fact", X), (_pos("fact", X, S),)))
    else:
        program += [Clause(_atom("trusted_source", Constant(s))) for s in [*filtered, COMPOSER_SOURCE]]
        program.append(Clause(_atom("fact", X), (_pos("fact", X, S), _pos("trusted_source", S))))
    program += ics.auxiliary_clauses

    constraints = list(ics.denials)
    if trust:
        for denial in ics.denials:
            constraints += trust_denials(denial)
    constraints += [
        _denial(_pos("insert", X), _pos("db", X, S)),
        _denial(_pos("retract", X), _neg("stored", X)),
    ]
    return AbductiveTheory(
        tuple(program),
        ABDUCIBLES,
        tuple(constraints),
        declared=frozenset({"db", "trust", "trusted_source"}) | ics.fresh_predicates,
    )


class _TimeLifter:
    """Rewrites a fact-level denial theory to hold at one time point."""

    def __init__(self, fresh: frozenset[str]):
        self.fresh = fresh

    def lift(self, literal: BodyLiteral, time: Variable) -> BodyLiteral:
        if not isinstance(literal, Literal):
            return literal
        atom = literal.atom
        if atom.predicate == "fact" and atom.arity == 1:
            return Literal(_atom("holds_at", atom.args[0], time), literal.positive)
        if atom.predicate in self.fresh:
            return Literal(Atom(atom.predicate, (*atom.args, time)), literal.positive)
        return literal

    def clause(self, clause: Clause) -> Clause:
        time = _fresh_variable("T", set(clause.variables()))
        head = Atom(clause.head.predicate, (*clause.head.args, time))
        return Clause(head, tuple(self.lift(lit, time) for lit in clause.body))


def compose_with_timestamps(
    databases: Iterable[DatabaseInstance], ics: DenialTheory = DenialTheory()
) -> AbductiveTheory:
    """The event-calculus composer.

    Timestamped facts become ``add_db(P, T)`` events, untimed facts hold
    ``initially`` and recorded deletions become ``del_db(P, T)`` events. The
    abducibles ``insert(P, T)`` and ``retract(P, T)`` are further events.
    Each constraint is checked right after every event through a guard
    predicate ``ic_<k>(T)`` and once at time 0. Time points range over
    ``0..max_timestamp + 1``.

    Raises:
        SchemaError: For negative timestamps.
    """
    databases = list(databases)
    merge_facts(databases)
    initially: set[Atom] = set()
    added: set[tuple[Atom, int]] = set()
    deleted: set[tuple[Atom, int]] = set()
    for db in databases:
        for fact in db.facts:
            if fact in db.timestamps:
                added.add((fact, db.timestamps[fact]))
            else:
                initially.add(fact)
        deleted.update(db.deletions)
    for atom, time in added | deleted:
        if time < 0:
            raise SchemaError(f"Negative timestamp {time} for {atom}.")
    horizon = max([t for _, t in added | deleted], default=0) + 1

    def events(predicate: str, items: set[tuple[Atom, int]]) -> list[Clause]:
        ordered = sorted(items, key=lambda item: (item[1], str(item[0])))
        return [Clause(_atom(predicate, atom_to_term(a), integer(t))) for a, t in ordered]

    program = [Clause(_atom("initially", atom_to_term(f))) for f in sorted_atoms(initially)]
    program += events("add_db", added) + events("del_db", deleted)
    program += [Clause(_atom("time", integer(t))) for t in range(horizon + 1)]
    program += [
        Clause(_atom("holds_at", P, T), (_pos("initially", P), _neg("clipped", integer(0), P, T))),
        Clause(
            _atom("holds_at", P, T),
            (_pos("time", E), Comparison("<", E, T), _pos("add", P, E), _neg("clipped", E, P, T)),
        ),
        Clause(
            _atom("clipped", E, P, T),
            (_pos("time", C), Comparison("<=", E, C), Comparison("<", C, T), _pos("del", P, C)),
        ),
        Clause(_atom("add", P, T), (_pos("add_db", P, T),)),
        Clause(_atom("add", P, T), (_pos("insert", P, T),)),
        Clause(_atom("del", P, T), (_pos("del_db", P, T),)),
        Clause(_atom("del", P, T), (_pos("retract", P, T),)),
    ]

    lifter = _TimeLifter(ics.fresh_predicates)
    program += [lifter.clause(c) if c.head.predicate in ics.fresh_predicates else c for c in ics.auxiliary_clauses]
    constraints = [
        _denial(_pos("insert", P, T), _pos("retract", P, T)),
        _denial(_pos("insert", P, T), _pos("add_db", P, T)),
        _denial(_pos("retract", P, T), _pos("del_db", P, T)),
    ]
    guards = []
    taken = {"holds_at", "clipped", "add", "del", "time", "initially", "add_db", "del_db"} | ics.fresh_predicates
    counter = 0
    for denial in ics.denials:
        counter += 1
        name = f"ic_{counter}"
        while name in taken:
            counter += 1
            name = f"ic_{counter}"
        taken.add(name)
        guards.append(name)
        time = _fresh_variable("T", set(body_variables(denial.body)))
        program.append(Clause(_atom(name, time), tuple(lifter.lift(lit, time) for lit in denial.body)))
        for event in ("add_db", "insert", "del_db", "retract"):
            next_time = Compound("+", (T, integer(1)))
            constraints.append(_denial(_pos(event, P, T), Equality(NT, next_time), _pos(name, NT)))
        constraints.append(_denial(_pos(name, integer(0))))

    return AbductiveTheory(
        tuple(program),
        ABDUCIBLES,
        tuple(constraints),
        declared=frozenset({"initially", "add_db", "del_db"}) | ics.fresh_predicates | frozenset(guards),
        timestamped=True,
    )
