"""Inference rules of the abductive procedure.

Every rule application turns one goal of a state into a tuple of successor
states (its OR-branches). Rule ids:

========  =====================================================
``D.1``   unfold a defined atom of a positive goal
``D.2``   unfold a defined atom inside a denial
``N.1``   move a negative literal of a positive goal into a denial
``N.2``   split a denial on a negative literal
``A.1``   reuse or abduce an abducible atom
``A.2``   resolve a denial against Δ and suspend it in Δ*
``E.1``   move an equality into the store
``E.2``   solve or delete an equality inside a denial
``E.3``   substitute universal variables inside a denial
``E.4``   branch on a free variable inside a denial
``CMP``   decide a ground comparison
========  =====================================================
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace

from repairdb.composer.compose import AbductiveTheory
from repairdb.engine.goals import (
    FreshNames,
    GoalFormula,
    PositiveGoal,
    State,
    Store,
    denial,
    normalize_goal,
    rename_clause,
    rename_universals,
)
from repairdb.logic.store import TUPLE_FUNCTOR, EqualityStore
from repairdb.logic.terms import (
    Atom,
    BodyLiteral,
    Comparison,
    Compound,
    Constant,
    Denial,
    Equality,
    Literal,
    Term,
    Variable,
    has_arithmetic,
    term_variables,
)
from repairdb.logic.unify import unify, unify_pairs

FLOUNDER = "flounder"


@dataclass(frozen=True)
class Expansion:
    """Result of applying one rule to the goal at ``goal_index``."""

    rule: str
    goal_index: int
    branches: tuple[State, ...] = ()
    floundered: bool = False
    ground_leading: bool = False

    @property
    def deterministic(self) -> bool:
        return not self.floundered and len(self.branches) <= 1


def pack(args: Sequence[Term]) -> Term:
    """One term standing for an argument vector."""
    if len(args) == 1:
        return args[0]
    if not args:
        return Constant("()")
    return Compound(TUPLE_FUNCTOR, tuple(args))


def compatible(s: Term, t: Term) -> bool:
    """Cheap necessary condition for unifiability (variables match anything)."""
    match s, t:
        case (Variable(), _) | (_, Variable()):
            return True
        case Constant(), Constant():
            return s == t
        case Compound(f, a), Compound(g, b):
            return f == g and len(a) == len(b) and all(compatible(x, y) for x, y in zip(a, b))
    return False


def _compatible_args(a: Sequence[Term], b: Sequence[Term]) -> bool:
    return len(a) == len(b) and all(compatible(x, y) for x, y in zip(a, b))


def _delayed(literal: BodyLiteral) -> bool:
    # arithmetic and comparisons wait until their variables are bound
    match literal:
        case Comparison():
            return not literal.is_ground()
        case Equality(lhs, rhs, _):
            return has_arithmetic(lhs) or has_arithmetic(rhs)
    return False


def _ground(literal: BodyLiteral) -> bool:
    return next(iter(literal.variables()), None) is None


def _holds(comparison: Comparison) -> bool:
    try:
        return comparison.evaluate()
    except ValueError:
        return False


def select_positive_literal(goal: PositiveGoal) -> int | None:
    for i, literal in enumerate(goal.literals):
        if not _delayed(literal):
            return i
    return None


def select_denial_literal(goal: Denial) -> int | None:
    """Leading literal of a denial, or ``None`` when it flounders.

    Equalities come first, then decidable disequalities and ground
    comparisons, then positive atoms, then negative literals and
    disequalities. Negative literals over universal variables are never
    selected.
    """
    universal = goal.universal_vars
    body = goal.body
    for i, literal in enumerate(body):
        if isinstance(literal, Equality) and literal.positive and not _delayed(literal):
            return i
    for i, literal in enumerate(body):
        if isinstance(literal, Equality) and not literal.positive and not _delayed(literal):
            mgu = unify(literal.lhs, literal.rhs)
            if mgu is None or not mgu:
                return i
        if isinstance(literal, Comparison) and literal.is_ground():
            return i
    for i, literal in enumerate(body):
        if isinstance(literal, Literal) and literal.positive:
            return i
    for i, literal in enumerate(body):
        if not _delayed(literal) and not set(literal.variables()) & universal:
            return i
    return None


class Rules:
    """Rule applications over one theory.

    Args:
        theory (AbductiveTheory): The abductive theory.
        names (FreshNames): Supply of fresh variables, shared by a derivation.
        reuse_first (bool): Order A.1's reuse branches before the fresh abduction.
    """

    def __init__(self, theory: AbductiveTheory, names: FreshNames, reuse_first: bool = True):
        self.theory = theory
        self.names = names
        self.reuse_first = reuse_first

    def expand(self, state: State, index: int) -> Expansion:
        goal = normalize_goal(state.goals[index], state.store.equalities.solved)
        if isinstance(goal, PositiveGoal):
            return self._expand_positive(state, index, goal)
        return self._expand_denial(state, index, goal)

    def _successor(
        self, state: State, index: int, goals: Iterable[GoalFormula], store: Store | None = None
    ) -> State | None:
        kept = []
        for goal in goals:
            if isinstance(goal, PositiveGoal) and goal.is_true:
                continue
            if isinstance(goal, Denial) and goal.is_false:
                return None
            kept.append(goal)
        return State(
            state.goals[:index] + tuple(kept) + state.goals[index + 1 :],
            state.store if store is None else store,
            state.depth + 1,
        )

    def _with_equalities(self, store: Store, equalities: EqualityStore | None) -> Store | None:
        return None if equalities is None else replace(store, equalities=equalities)

    @staticmethod
    def _result(rule: str, index: int, branches: Iterable[State | None], ground: bool = False) -> Expansion:
        return Expansion(rule, index, tuple(b for b in branches if b is not None), ground_leading=ground)

    # positive goals

    def _expand_positive(self, state: State, index: int, goal: PositiveGoal) -> Expansion:
        if goal.is_true:
            return self._result("TRUE", index, [self._successor(state, index, [])])
        position = select_positive_literal(goal)
        if position is None:
            return Expansion(FLOUNDER, index, floundered=True)
        literal = goal.literals[position]
        rest = PositiveGoal(goal.literals[:position] + goal.literals[position + 1 :])
        ground = _ground(literal)
        store = state.store

        match literal:
            case Equality(lhs, rhs, True):
                new = self._with_equalities(store, store.equalities.add_equality(lhs, rhs))
                return self._result("E.1", index, [new and self._successor(state, index, [rest], new)], ground)
            case Equality(lhs, rhs, False):
                new = self._with_equalities(store, store.equalities.add_disequality((), lhs, rhs))
                return self._result("N.1", index, [new and self._successor(state, index, [rest], new)], ground)
            case Comparison():
                branches = [self._successor(state, index, [rest])] if _holds(literal) else []
                return self._result("CMP", index, branches, ground)
            case Literal(atom, False):
                return self._result(
                    "N.1", index, [self._successor(state, index, [rest, Denial(frozenset(), (Literal(atom),))])], ground
                )
            case Literal(atom, True) if self.theory.is_abducible(atom.predicate):
                return self._result("A.1", index, self._abduce(state, index, atom, rest), ground)
            case Literal(atom, True):
                return self._result("D.1", index, self._unfold(state, index, atom, rest), ground)
        raise TypeError(f"Unexpected literal {literal!r}")

    def _unfold(self, state: State, index: int, atom: Atom, rest: PositiveGoal) -> list[State | None]:
        branches = []
        for clause in self.theory.clauses_for(atom.predicate):
            if not _compatible_args(atom.args, clause.head.args):
                continue
            renamed, _ = rename_clause(clause, self.names)
            new = self._with_equalities(
                state.store, state.store.equalities.add_equalities(zip(atom.args, renamed.head.args))
            )
            if new is not None:
                goal = PositiveGoal(renamed.body + rest.literals)
                branches.append(self._successor(state, index, [goal], new))
        return branches

    def _abduce(self, state: State, index: int, atom: Atom, rest: PositiveGoal) -> list[State | None]:
        store = state.store
        equalities = store.equalities
        same = [b for b in store.delta if b.predicate == atom.predicate and b.arity == atom.arity]

        reuse = []
        for member in same:
            new = self._with_equalities(store, equalities.add_equalities(zip(atom.args, member.args)))
            if new is not None:
                reuse.append(self._successor(state, index, [rest], new))

        fresh_equalities: EqualityStore | None = equalities
        for member in same:
            fresh_equalities = fresh_equalities.add_disequality((), pack(atom.args), pack(member.args))
            if fresh_equalities is None:
                break
        fresh = None
        if fresh_equalities is not None:
            discharged = []
            for suspended in store.delta_star:
                lead = suspended.body[0].atom
                if lead.predicate != atom.predicate or lead.arity != atom.arity:
                    continue
                suspended = rename_universals(suspended, self.names)
                instance = self._match(
                    suspended.universal_vars, suspended.body[0].atom.args, atom.args, suspended.body[1:]
                )
                if instance is not None:
                    discharged.append(instance)
            new = Store(store.delta + (atom,), store.delta_star, fresh_equalities)
            fresh = self._successor(state, index, [rest, *discharged], new)
        return [*reuse, fresh] if self.reuse_first else [fresh, *reuse]

    # denials

    def _match(
        self, universal: frozenset[str], args: Sequence[Term], other: Sequence[Term], rest: Sequence[BodyLiteral]
    ) -> Denial | None:
        """``forall universal: <- args = other & rest``, simplified.

        ``None`` when the argument vectors cannot unify (the instance holds
        trivially). Bindings of universal variables only are substituted away.
        """
        if not _compatible_args(args, other):
            return None
        mgu = unify_pairs(zip(args, other), prefer=universal)
        if mgu is None:
            return None
        if all(name in universal for name in mgu):
            body = tuple(lit.substitute(mgu) for lit in rest)
            return denial(universal - set(mgu), body)
        return denial(universal, (Equality(pack(args), pack(other)), *rest))

    def _expand_denial(self, state: State, index: int, goal: Denial) -> Expansion:
        if goal.is_false:
            return Expansion("E.2", index)
        position = select_denial_literal(goal)
        if position is None:
            return Expansion(FLOUNDER, index, floundered=True)
        literal = goal.body[position]
        rest = goal.body[:position] + goal.body[position + 1 :]
        universal = goal.universal_vars
        ground = _ground(literal)
        store = state.store

        match literal:
            case Equality(lhs, rhs, True):
                return self._denial_equality(state, index, universal, lhs, rhs, rest)
            case Equality(lhs, rhs, False):
                mgu = unify(lhs, rhs)
                if mgu is None:
                    kept = self._successor(state, index, [denial(universal, rest)])
                    return self._result("E.2", index, [kept], ground)
                if not mgu:
                    return self._result("E.2", index, [self._successor(state, index, [])], ground)
                equal = self._with_equalities(store, store.equalities.add_equality(lhs, rhs))
                unequal = self._with_equalities(store, store.equalities.add_disequality((), lhs, rhs))
                return self._result(
                    "N.2",
                    index,
                    [
                        equal and self._successor(state, index, [], equal),
                        unequal and self._successor(state, index, [denial(universal, rest)], unequal),
                    ],
                    ground,
                )
            case Comparison():
                goals = [denial(universal, rest)] if _holds(literal) else []
                return self._result("CMP", index, [self._successor(state, index, goals)], ground)
            case Literal(atom, False):
                return self._result(
                    "N.2",
                    index,
                    [
                        self._successor(state, index, [PositiveGoal((Literal(atom),))]),
                        self._successor(
                            state, index, [Denial(frozenset(), (Literal(atom),)), denial(universal, rest)]
                        ),
                    ],
                    ground,
                )
            case Literal(atom, True) if self.theory.is_abducible(atom.predicate):
                return self._result("A.2", index, [self._resolve_abducible(state, index, goal, literal, rest)], ground)
            case Literal(atom, True):
                return self._result("D.2", index, [self._unfold_denial(state, index, universal, atom, rest)], ground)
        raise TypeError(f"Unexpected literal {literal!r}")

    def _denial_equality(
        self,
        state: State,
        index: int,
        universal: frozenset[str],
        lhs: Term,
        rhs: Term,
        rest: tuple[BodyLiteral, ...],
    ) -> Expansion:
        mgu = unify(lhs, rhs, prefer=universal)
        if mgu is None:
            return self._result("E.2", index, [self._successor(state, index, [])])
        bound = {name: term for name, term in mgu.items() if name in universal}
        free = {name: term for name, term in mgu.items() if name not in universal}
        body = tuple(lit.substitute(bound) for lit in rest) if bound else rest
        remaining = universal - set(bound)
        if not free:
            rule = "E.3" if bound else "E.2"
            return self._result(rule, index, [self._successor(state, index, [denial(remaining, body)])])

        name = sorted(free)[0]
        term = free[name]
        term_vars = set(term_variables(term))
        others = tuple(Equality(Variable(k), v) for k, v in sorted(free.items()) if k != name)
        equalities = state.store.equalities

        # branch 1: the variable differs from every instance of the term
        unequal = self._with_equalities(
            state.store, equalities.add_disequality(remaining & term_vars, Variable(name), term)
        )
        # branch 2: it equals the term; the term's universal variables become free
        equal = self._with_equalities(state.store, equalities.add_equality(Variable(name), term))
        return self._result(
            "E.4",
            index,
            [
                unequal and self._successor(state, index, [], unequal),
                equal and self._successor(state, index, [denial(remaining - term_vars, others + body)], equal),
            ],
        )

    def _resolve_abducible(
        self, state: State, index: int, goal: Denial, literal: Literal, rest: tuple[BodyLiteral, ...]
    ) -> State | None:
        store = state.store
        atom = literal.atom
        suspended = Denial(goal.universal_vars, (literal, *rest))
        instances = []
        for member in store.delta:
            if member.predicate != atom.predicate or member.arity != atom.arity:
                continue
            copy = rename_universals(suspended, self.names)
            resolved = tuple(store.equalities.resolve(t) for t in member.args)
            instance = self._match(copy.universal_vars, copy.body[0].atom.args, resolved, copy.body[1:])
            if instance is not None:
                instances.append(instance)
        new = replace(store, delta_star=store.delta_star + (suspended,))
        return self._successor(state, index, instances, new)

    def _unfold_denial(
        self, state: State, index: int, universal: frozenset[str], atom: Atom, rest: tuple[BodyLiteral, ...]
    ) -> State | None:
        denials = []
        for clause in self.theory.clauses_for(atom.predicate):
            if not _compatible_args(atom.args, clause.head.args):
                continue
            renamed, fresh = rename_clause(clause, self.names)
            instance = self._match(universal | fresh, atom.args, renamed.head.args, renamed.body + rest)
            if instance is not None:
                denials.append(rename_universals(instance, self.names))
        return self._successor(state, index, denials)


RULE_FAMILIES = {
    "defined": ("D.1", "D.2"),
    "negation": ("N.1", "N.2"),
    "abducible": ("A.1", "A.2"),
    "equality": ("E.1", "E.2", "E.3", "E.4"),
}


def _apply_family(family: str, rules: Rules, state: State, selected: int) -> tuple[State, ...]:
    expansion = rules.expand(state, selected)
    if expansion.rule not in RULE_FAMILIES[family]:
        raise ValueError(f"Goal {selected} needs rule {expansion.rule}, not one of the {family} rules.")
    return expansion.branches


def apply_rule_defined(rules: Rules, state: State, selected: int) -> tuple[State, ...]:
    """Unfold the leading defined atom of goal ``selected`` (D.1 in a positive goal, D.2 in a denial)."""
    return _apply_family("defined", rules, state, selected)


def apply_rule_negation(rules: Rules, state: State, selected: int) -> tuple[State, ...]:
    return _apply_family("negation", rules, state, selected)


def apply_rule_abducible(rules: Rules, state: State, selected: int) -> tuple[State, ...]:
    """Reuse or abduce the leading abducible (A.1), or resolve a denial against Δ (A.2)."""
    return _apply_family("abducible", rules, state, selected)


def apply_rule_equality(rules: Rules, state: State, selected: int) -> tuple[State, ...]:
    return _apply_family("equality", rules, state, selected)


def check_store_invariants(store: Store) -> None:
    """Raise ``AssertionError`` when a Δ member falsifies a suspended unit denial."""
    for suspended in store.delta_star:
        if len(suspended.body) != 1:
            continue
        lead = suspended.body[0].atom
        for member in store.delta:
            if member.predicate != lead.predicate or member.arity != lead.arity:
                continue
            args = tuple(store.equalities.resolve(t) for t in member.args)
            mgu = unify_pairs(zip(lead.args, args), prefer=suspended.universal_vars)
            if mgu is None:
                continue
            free = [(Variable(k), v) for k, v in mgu.items() if k not in suspended.universal_vars]
            if store.equalities.add_equalities(free) is not None:
                raise AssertionError(f"{member} violates the suspended denial {suspended}.")
