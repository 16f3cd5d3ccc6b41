"""From first-order integrity constraints to denials plus auxiliary clauses.

The transformation starts from ``<- not ic`` and rewrites the body into a
disjunction of conjunctions of literals. Every disjunct becomes one denial.
A negated existential that cannot be flattened into the surrounding
conjunction is named by a fresh auxiliary predicate defined by its own
clauses.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from repairdb.exceptions import TransformError
from repairdb.logic.terms import (
    Atom,
    BodyLiteral,
    Clause,
    Comparison,
    Constant,
    Denial,
    Equality,
    Literal,
    Variable,
    atom_to_term,
    body_variables,
)
from repairdb.transform.formula import (
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
    atoms,
    free_variables,
    negation_normal_form,
    substitute,
    universal_closure,
)

logger = logging.getLogger(__name__)

RESERVED_PREDICATES = frozenset({"db", "fact", "insert", "retract"})

# conjunction of body literals together with its existentially bound variables
_Disjunct = tuple[tuple[BodyLiteral, ...], frozenset[str]]


@dataclass(frozen=True)
class DenialTheory:
    denials: tuple[Denial, ...] = ()
    auxiliary_clauses: tuple[Clause, ...] = ()
    fresh_predicates: frozenset[str] = frozenset()
    aliases: dict[str, str] = field(default_factory=dict, hash=False)

    def merge(self, other: DenialTheory) -> DenialTheory:
        clash = self.fresh_predicates & other.fresh_predicates
        if clash:
            raise TransformError(f"Auxiliary predicates defined twice: {sorted(clash)}.")
        return DenialTheory(
            self.denials + other.denials,
            self.auxiliary_clauses + other.auxiliary_clauses,
            self.fresh_predicates | other.fresh_predicates,
            {**self.aliases, **other.aliases},
        )

    def listing(self) -> str:
        lines = [str(c) for c in self.auxiliary_clauses] + [str(d) for d in self.denials]
        return "\n".join(lines)


class _AuxiliaryNames:
    def __init__(self, taken: Iterable[str], supplied: Iterable[str] | None = None):
        self.taken = set(taken) | RESERVED_PREDICATES
        self.supplied: Iterator[str] = iter(supplied or ())
        self.counter = itertools.count(1)

    def next(self) -> str:
        for name in self.supplied:
            if name in self.taken:
                raise TransformError(f"Auxiliary name {name} clashes with an existing predicate.")
            self.taken.add(name)
            return name
        while True:
            name = f"aux_{next(self.counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


class _Expander:
    def __init__(self, names: _AuxiliaryNames):
        self.names = names
        self.used_vars: set[str] = set()
        self.clauses: list[Clause] = []
        self.fresh: list[str] = []
        self.aliases: dict[str, str] = {}

    def bind(self, variables: tuple[str, ...], body: Formula) -> tuple[tuple[str, ...], Formula]:
        renaming = {}
        bound = []
        for name in variables:
            new = name
            suffix = 1
            while new in self.used_vars:
                new = f"{name}{suffix}"
                suffix += 1
            self.used_vars.add(new)
            bound.append(new)
            if new != name:
                renaming[name] = Variable(new)
        return tuple(bound), substitute(body, renaming)

    def expand(self, f: Formula) -> list[_Disjunct]:
        match f:
            case Pred(atom):
                return [((Literal(atom),), frozenset())]
            case Equals(lhs, rhs):
                return [((Equality(lhs, rhs),), frozenset())]
            case Compare(op, lhs, rhs):
                return [((Comparison(op, lhs, rhs),), frozenset())]
            case Truth(value):
                return [((), frozenset())] if value else []
            case And(parts):
                result: list[_Disjunct] = [((), frozenset())]
                for part in parts:
                    expansion = self.expand(part)
                    result = [(a + b, va | vb) for a, va in result for b, vb in expansion]
                return result
            case Or(parts):
                return [d for part in parts for d in self.expand(part)]
            case Implies(a, b):
                return self.expand(Or((Not(a), b)))
            case Exists(variables, body):
                bound, body = self.bind(variables, body)
                return [(lits, names | frozenset(bound)) for lits, names in self.expand(body)]
            case ForAll(variables, body):
                return self.expand(Not(Exists(variables, Not(body))))
            case Not(inner):
                return self.expand_negation(inner)
        raise TypeError(f"Not a formula: {f!r}")

    def expand_negation(self, f: Formula) -> list[_Disjunct]:
        match f:
            case Pred(atom):
                return [((Literal(atom, positive=False),), frozenset())]
            case Equals(lhs, rhs):
                return [((Equality(lhs, rhs, positive=False),), frozenset())]
            case Compare(op, lhs, rhs):
                return [((Comparison(op, lhs, rhs).negate(),), frozenset())]
            case Truth(value):
                return self.expand(Truth(not value))
            case Not(inner):
                return self.expand(inner)
            case And(parts):
                return self.expand(Or(tuple(Not(p) for p in parts)))
            case Or(parts):
                return self.expand(And(tuple(Not(p) for p in parts)))
            case Implies(a, b):
                return self.expand(And((a, Not(b))))
            case ForAll(variables, body):
                return self.expand(Exists(variables, Not(body)))
            case Exists():
                return [((Literal(self.auxiliary(f), positive=False),), frozenset())]
        raise TypeError(f"Not a formula: {f!r}")

    def auxiliary(self, f: Exists) -> Atom:
        name = self.names.next()
        head = Atom(name, tuple(Variable(v) for v in free_variables(f)))
        self.fresh.append(name)
        if len(f.variables) == 1 and isinstance(f.body, Pred):
            self.aliases[name] = f"has_{f.body.atom.predicate}"
        for lits, _ in self.expand(f):
            self.clauses.append(Clause(head, lits))
        return head


def _user_predicates(formulas: Iterable[Formula]) -> set[str]:
    return {atom.predicate for f in formulas for atom in atoms(f)}


def lloyd_topor(ic: Formula, aux_names: Iterable[str] | None = None) -> DenialTheory:
    """Transform one integrity constraint into denial form.

    Args:
        ic (Formula): The constraint; free variables are universally closed.
        aux_names (Iterable[str], optional): Names to use for auxiliary
            predicates, consumed in order of introduction. When exhausted,
            ``aux_<k>`` names are generated.

    Returns:
        DenialTheory: Denials, auxiliary clauses and the fresh predicate names.
    """
    return lloyd_topor_all([ic], aux_names)


def lloyd_topor_all(ics: Iterable[Formula], aux_names: Iterable[str] | None = None) -> DenialTheory:
    """Transform constraints in order; auxiliary numbering is shared and deterministic."""
    ics = list(ics)
    names = _AuxiliaryNames(_user_predicates(ics), aux_names)
    theory = DenialTheory()
    for ic in ics:
        expander = _Expander(names)
        closed = universal_closure(ic)
        denials = tuple(
            Denial(frozenset(body_variables(lits)), lits) for lits, _ in expander.expand(Not(closed))
        )
        part = DenialTheory(denials, tuple(expander.clauses), frozenset(expander.fresh), expander.aliases)
        logger.debug(
            "constraint transformed into %d denials, %d auxiliary clauses", len(denials), len(part.auxiliary_clauses)
        )
        theory = theory.merge(part)
    check_non_recursive(theory.auxiliary_clauses)
    return theory


def check_non_recursive(clauses: Iterable[Clause]) -> None:
    """Raise :class:`TransformError` when the clauses define a recursive predicate.

    Predicates are told apart by name and arity, so ``fact/1`` may be defined
    through ``fact/2``.
    """
    depends: dict[tuple[str, int], set[tuple[str, int]]] = {}
    for clause in clauses:
        edges = depends.setdefault(_signature(clause.head), set())
        edges.update(_signature(lit.atom) for lit in clause.body if isinstance(lit, Literal))

    visiting: set[tuple[str, int]] = set()
    done: set[tuple[str, int]] = set()

    def visit(predicate: tuple[str, int], path: tuple[tuple[str, int], ...]) -> None:
        if predicate in done:
            return
        if predicate in visiting:
            cycle = " -> ".join(f"{name}/{arity}" for name, arity in path + (predicate,))
            raise TransformError(f"Recursive definition through {cycle}.")
        visiting.add(predicate)
        for child in sorted(depends.get(predicate, ())):
            visit(child, path + (predicate,))
        visiting.discard(predicate)
        done.add(predicate)

    for predicate in sorted(depends):
        visit(predicate, ())


def _signature(atom: Atom) -> tuple[str, int]:
    return atom.predicate, atom.arity


def _restricted(f: Formula) -> frozenset[str]:
    """Variables bound by positive occurrences of ``f`` (in negation normal form)."""
    match f:
        case Pred(atom):
            return frozenset(atom.variables())
        case Equals(Variable(name), Constant()) | Equals(Constant(), Variable(name)):
            return frozenset({name})
        case And(parts):
            return frozenset().union(*(_restricted(p) for p in parts))
        case Or(parts):
            if not parts:
                return frozenset()
            return frozenset.intersection(*(_restricted(p) for p in parts))
        case Exists(variables, body):
            return _restricted(body) - set(variables)
    return frozenset()


def guard_unsafe(ic: Formula, domain_predicate: str = "dom") -> Formula:
    """Guard quantified variables that would flounder with ``domain_predicate``.

    ``forall x: psi`` is safe when ``x`` is bound by a positive occurrence in
    ``not psi``; ``exists x: psi`` when it is bound in ``psi``. Unsafe
    variables get ``dom(x) -> psi`` and ``dom(x) & psi`` respectively.
    """

    def guard(variables: Iterable[str]) -> Formula:
        atoms_ = [Pred(Atom(domain_predicate, (Variable(v),))) for v in variables]
        return atoms_[0] if len(atoms_) == 1 else And(tuple(atoms_))

    match ic:
        case Not(body):
            return Not(guard_unsafe(body, domain_predicate))
        case And(parts):
            return And(tuple(guard_unsafe(p, domain_predicate) for p in parts))
        case Or(parts):
            return Or(tuple(guard_unsafe(p, domain_predicate) for p in parts))
        case Implies(a, b):
            return Implies(guard_unsafe(a, domain_predicate), guard_unsafe(b, domain_predicate))
        case ForAll(variables, body):
            bound = _restricted(negation_normal_form(Not(body)))
            unsafe = [v for v in variables if v not in bound]
            body = guard_unsafe(body, domain_predicate)
            return ForAll(variables, Implies(guard(unsafe), body) if unsafe else body)
        case Exists(variables, body):
            bound = _restricted(negation_normal_form(body))
            unsafe = [v for v in variables if v not in bound]
            body = guard_unsafe(body, domain_predicate)
            return Exists(variables, And((guard(unsafe), body)) if unsafe else body)
    return ic


def rewrite_fact_level(theory: DenialTheory, keep: Iterable[str] = ()) -> DenialTheory:
    """Wrap every user-predicate atom ``p(t)`` as ``fact(p(t))``.

    Fresh auxiliary predicates, the predicates listed in ``keep`` (such as
    the domain predicate) and (dis)equality or comparison literals are left
    untouched.
    """
    skip = theory.fresh_predicates | set(keep)

    def lift(literal: BodyLiteral) -> BodyLiteral:
        if isinstance(literal, Literal) and literal.atom.predicate not in skip:
            return Literal(Atom("fact", (atom_to_term(literal.atom),)), literal.positive)
        return literal

    denials = tuple(Denial(d.universal_vars, tuple(lift(lit) for lit in d.body)) for d in theory.denials)
    clauses = tuple(Clause(c.head, tuple(lift(lit) for lit in c.body)) for c in theory.auxiliary_clauses)
    return DenialTheory(denials, clauses, theory.fresh_predicates, dict(theory.aliases))
