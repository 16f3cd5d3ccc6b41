"""Goals, stores, states and derivation outcomes."""

from __future__ import annotations

import itertools
import threading
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Union

from repairdb.engine.trace import TraceRecord
from repairdb.logic.store import EMPTY_STORE, EqualityStore
from repairdb.logic.terms import (
    Atom,
    BodyLiteral,
    Clause,
    Comparison,
    Denial,
    Equality,
    Term,
    Variable,
    body_variables,
    evaluate_arithmetic,
    render_conjunction,
)
from repairdb.logic.unify import Substitution


@dataclass(frozen=True)
class PositiveGoal:
    """An ordered conjunction; the empty one is ``true``."""

    literals: tuple[BodyLiteral, ...] = ()

    @property
    def is_true(self) -> bool:
        return not self.literals

    def __str__(self) -> str:
        return render_conjunction(self.literals)


GoalFormula = Union[PositiveGoal, Denial]


@dataclass(frozen=True)
class Store:
    """``(Δ, Δ*, E)``: abduced atoms, suspended denials and the equality store."""

    delta: tuple[Atom, ...] = ()
    delta_star: tuple[Denial, ...] = ()
    equalities: EqualityStore = EMPTY_STORE

    def resolved_delta(self) -> tuple[Atom, ...]:
        return tuple(Atom(a.predicate, tuple(self.equalities.resolve(t) for t in a.args)) for a in self.delta)

    def ground_delta(self) -> frozenset[Atom]:
        return frozenset(a for a in self.resolved_delta() if a.is_ground())

    def __str__(self) -> str:
        delta = ", ".join(map(str, self.resolved_delta()))
        return f"Δ = {{{delta}}}, Δ* = {len(self.delta_star)} denials, E = {self.equalities}"


@dataclass(frozen=True)
class State:
    """``(G, ST)`` plus the rule applications that led here."""

    goals: tuple[GoalFormula, ...]
    store: Store = field(default_factory=Store)
    depth: int = 0
    path: tuple[TraceRecord, ...] = ()

    @property
    def is_solution(self) -> bool:
        return not self.goals


@dataclass(frozen=True)
class Solution:
    store: Store
    path: tuple[TraceRecord, ...] = ()

    @property
    def delta(self) -> tuple[Atom, ...]:
        return self.store.resolved_delta()

    @property
    def equalities(self) -> EqualityStore:
        return self.store.equalities


@dataclass(frozen=True)
class Failure:
    """The search tree was exhausted without a solution."""


@dataclass(frozen=True)
class Floundered:
    goal: GoalFormula


@dataclass(frozen=True)
class BudgetExhausted:
    """The search stopped early; the solutions emitted so far are not necessarily all."""

    steps: int
    reason: str


DerivationOutcome = Union[Solution, Failure, Floundered, BudgetExhausted]


class FreshNames:
    """Thread-safe supply of variable renamings ``X#1, X#2, ...``."""

    def __init__(self):
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def next(self) -> int:
        with self._lock:
            return next(self._counter)

    def variable(self, name: str) -> Variable:
        return Variable(f"{name.split('#')[0]}#{self.next()}")

    def renaming(self, names: Iterable[str]) -> dict[str, Term]:
        return {name: self.variable(name) for name in names}


def rename_clause(clause: Clause, names: FreshNames) -> tuple[Clause, frozenset[str]]:
    """A variant of ``clause`` with fresh variables, and those variables."""
    renaming = names.renaming(clause.variables())
    head = clause.head.substitute(renaming)
    body = tuple(lit.substitute(renaming) for lit in clause.body)
    return Clause(head, body), frozenset(v.name for v in renaming.values())


def rename_universals(denial: Denial, names: FreshNames) -> Denial:
    if not denial.universal_vars:
        return denial
    renaming = names.renaming(sorted(denial.universal_vars))
    universal = frozenset(v.name for v in renaming.values())
    return Denial(universal, tuple(lit.substitute(renaming) for lit in denial.body))


def normalize_literal(literal: BodyLiteral, bindings: Mapping[str, Term]) -> BodyLiteral:
    """Apply the solved equalities and fold ground arithmetic."""
    literal = literal.substitute(bindings) if bindings else literal
    match literal:
        case Equality(lhs, rhs, positive):
            return Equality(evaluate_arithmetic(lhs), evaluate_arithmetic(rhs), positive)
        case Comparison(op, lhs, rhs):
            return Comparison(op, evaluate_arithmetic(lhs), evaluate_arithmetic(rhs))
    return literal


def normalize_goal(goal: GoalFormula, solved: Substitution) -> GoalFormula:
    """Instantiate the free variables of ``goal`` with the solved equalities.

    Universal variables are always fresh, so they are never bound by ``solved``.
    """
    if isinstance(goal, PositiveGoal):
        return PositiveGoal(tuple(normalize_literal(lit, solved) for lit in goal.literals))
    return Denial(goal.universal_vars, tuple(normalize_literal(lit, solved) for lit in goal.body))


def denial(universal: Iterable[str], body: Iterable[BodyLiteral]) -> Denial:
    body = tuple(body)
    return Denial(frozenset(universal) & frozenset(body_variables(body)), body)
