"""First-order formulas used for integrity constraints."""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from typing import Union

from repairdb.exceptions import SchemaError
from repairdb.logic.terms import (
    Atom,
    Constant,
    Term,
    substitute_term,
    term_constants,
    term_variables,
)


@dataclass(frozen=True)
class Pred:
    atom: Atom


@dataclass(frozen=True)
class Equals:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Compare:
    op: str
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Or:
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies:
    antecedent: Formula
    consequent: Formula


@dataclass(frozen=True)
class ForAll:
    variables: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Exists:
    variables: tuple[str, ...]
    body: Formula


Formula = Union[Pred, Equals, Compare, Truth, Not, And, Or, Implies, ForAll, Exists]

TRUE = Truth(True)
FALSE = Truth(False)


def conjunction(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def free_variables(formula: Formula) -> tuple[str, ...]:
    """Free variable names in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk(f: Formula, bound: frozenset[str]) -> None:
        match f:
            case Pred(atom):
                names = atom.variables()
            case Equals(lhs, rhs) | Compare(_, lhs, rhs):
                names = [*term_variables(lhs), *term_variables(rhs)]
            case Truth():
                names = []
            case Not(body):
                walk(body, bound)
                return
            case And(parts) | Or(parts):
                for part in parts:
                    walk(part, bound)
                return
            case Implies(a, b):
                walk(a, bound)
                walk(b, bound)
                return
            case ForAll(variables, body) | Exists(variables, body):
                walk(body, bound | set(variables))
                return
            case _:
                raise TypeError(f"Not a formula node: {f!r}")
        for name in names:
            if name not in bound:
                seen.setdefault(name, None)

    walk(formula, frozenset())
    return tuple(seen)


def subformulas(formula: Formula) -> Iterator[Formula]:
    yield formula
    match formula:
        case Not(body) | ForAll(_, body) | Exists(_, body):
            yield from subformulas(body)
        case And(parts) | Or(parts):
            for part in parts:
                yield from subformulas(part)
        case Implies(a, b):
            yield from subformulas(a)
            yield from subformulas(b)


def atoms(formula: Formula) -> Iterator[Atom]:
    for sub in subformulas(formula):
        if isinstance(sub, Pred):
            yield sub.atom


def constants(formula: Formula) -> Iterator[Constant]:
    for sub in subformulas(formula):
        match sub:
            case Pred(atom):
                for arg in atom.args:
                    yield from term_constants(arg)
            case Equals(lhs, rhs) | Compare(_, lhs, rhs):
                yield from term_constants(lhs)
                yield from term_constants(rhs)


def signatures(formula: Formula) -> dict[str, int]:
    """Predicate arities used in ``formula``.

    Raises:
        SchemaError: When one predicate is used with two arities.
    """
    result: dict[str, int] = {}
    for atom in atoms(formula):
        known = result.setdefault(atom.predicate, atom.arity)
        if known != atom.arity:
            raise SchemaError(f"Predicate {atom.predicate} is used with arities {known} and {atom.arity}.")
    return result


def substitute(formula: Formula, bindings: Mapping[str, Term]) -> Formula:
    """Replace free variables; quantified variables shadow ``bindings``."""
    if not bindings:
        return formula
    match formula:
        case Pred(atom):
            return Pred(atom.substitute(bindings))
        case Equals(lhs, rhs):
            return Equals(substitute_term(lhs, bindings), substitute_term(rhs, bindings))
        case Compare(op, lhs, rhs):
            return Compare(op, substitute_term(lhs, bindings), substitute_term(rhs, bindings))
        case Truth():
            return formula
        case Not(body):
            return Not(substitute(body, bindings))
        case And(parts):
            return And(tuple(substitute(p, bindings) for p in parts))
        case Or(parts):
            return Or(tuple(substitute(p, bindings) for p in parts))
        case Implies(a, b):
            return Implies(substitute(a, bindings), substitute(b, bindings))
        case ForAll(variables, body):
            inner = {k: v for k, v in bindings.items() if k not in variables}
            return ForAll(variables, substitute(body, inner))
        case Exists(variables, body):
            inner = {k: v for k, v in bindings.items() if k not in variables}
            return Exists(variables, substitute(body, inner))
    raise TypeError(f"Not a formula: {formula!r}")


def universal_closure(formula: Formula) -> Formula:
    free = free_variables(formula)
    return ForAll(free, formula) if free else formula


def negation_normal_form(formula: Formula) -> Formula:
    """Implications eliminated, negations pushed onto atoms, equalities and comparisons."""
    match formula:
        case Not(body):
            return _negate(body)
        case And(parts):
            return And(tuple(negation_normal_form(p) for p in parts))
        case Or(parts):
            return Or(tuple(negation_normal_form(p) for p in parts))
        case Implies(a, b):
            return Or((_negate(a), negation_normal_form(b)))
        case ForAll(variables, body):
            return ForAll(variables, negation_normal_form(body))
        case Exists(variables, body):
            return Exists(variables, negation_normal_form(body))
    return formula


def _negate(formula: Formula) -> Formula:
    match formula:
        case Pred() | Equals() | Compare():
            return Not(formula)
        case Truth(value):
            return Truth(not value)
        case Not(body):
            return negation_normal_form(body)
        case And(parts):
            return Or(tuple(_negate(p) for p in parts))
        case Or(parts):
            return And(tuple(_negate(p) for p in parts))
        case Implies(a, b):
            return And((negation_normal_form(a), _negate(b)))
        case ForAll(variables, body):
            return Exists(variables, _negate(body))
        case Exists(variables, body):
            return ForAll(variables, _negate(body))
    raise TypeError(f"Not a formula: {formula!r}")
