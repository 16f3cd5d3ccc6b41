"""The equality store E: solved equalities plus constructive-negation disequalities."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from repairdb.logic.terms import (
    Compound,
    Term,
    Variable,
    evaluate_arithmetic,
    substitute_term,
    term_variables,
)
from repairdb.logic.unify import EMPTY, Substitution, unify

# functor packing several free-variable bindings into one disequality
TUPLE_FUNCTOR = "$tuple"


@dataclass(frozen=True)
class Disequality:
    """``forall universal_vars: lhs != rhs``."""

    universal_vars: frozenset[str]
    lhs: Term
    rhs: Term

    def variables(self) -> set[str]:
        return set(term_variables(self.lhs)) | set(term_variables(self.rhs))

    @property
    def free_vars(self) -> set[str]:
        return self.variables() - self.universal_vars

    def substitute(self, bindings) -> Disequality:
        return Disequality(
            self.universal_vars, substitute_term(self.lhs, bindings), substitute_term(self.rhs, bindings)
        )

    def __str__(self) -> str:
        lhs, rhs = _render_side(self.lhs), _render_side(self.rhs)
        body = f"{lhs} != {rhs}"
        if self.universal_vars:
            return f"forall {', '.join(sorted(self.universal_vars))}: {body}"
        return body


def _render_side(term: Term) -> str:
    if isinstance(term, Compound) and term.functor == TUPLE_FUNCTOR:
        return "(" + ", ".join(str(a) for a in term.args) + ")"
    return str(term)


_TRIVIAL = object()


def _oriented(mgu: Substitution, universal_vars: frozenset[str]) -> dict[str, Term]:
    """The mgu with each class of free variables bound to the largest name in it.

    ``X != Y`` and ``Y != X`` then simplify to the same disequality.
    """
    classes: dict[str, list[str]] = {}
    for name, term in mgu.items():
        if name not in universal_vars and isinstance(term, Variable) and term.name not in universal_vars:
            classes.setdefault(term.name, []).append(name)
    renaming: dict[str, Term] = {}
    for root, members in classes.items():
        largest = max([root, *members])
        if largest != root:
            renaming[root] = Variable(largest)
    if not renaming:
        return dict(mgu)
    roots = {v.name for v in renaming.values()}
    result = {name: substitute_term(term, renaming) for name, term in mgu.items() if name not in roots}
    result.update(renaming)
    return result


def _simplify(universal_vars: frozenset[str], lhs: Term, rhs: Term) -> Disequality | None | object:
    """Normalize ``forall U: lhs != rhs``.

    Returns ``_TRIVIAL`` when the disequality always holds, ``None`` when it can
    never hold, otherwise the disequality over the free variables it constrains.
    """
    unifier = unify(evaluate_arithmetic(lhs), evaluate_arithmetic(rhs), prefer=universal_vars)
    if unifier is None:
        return _TRIVIAL
    mgu = _oriented(unifier, universal_vars)
    free = sorted(name for name in mgu if name not in universal_vars)
    if not free:
        return None
    if len(free) == 1:
        new_lhs: Term = Variable(free[0])
        new_rhs = mgu[free[0]]
    else:
        new_lhs = Compound(TUPLE_FUNCTOR, tuple(Variable(name) for name in free))
        new_rhs = Compound(TUPLE_FUNCTOR, tuple(mgu[name] for name in free))
    remaining = universal_vars & set(term_variables(new_rhs))
    return Disequality(frozenset(remaining), new_lhs, new_rhs)


@dataclass(frozen=True)
class EqualityStore:
    """Consistent store of solved equalities and simplified disequalities.

    Adding information returns a new store, or ``None`` when the result is
    inconsistent. Every retained disequality constrains at least one free
    variable, so a store value is always satisfiable over an infinite
    Herbrand universe.
    """

    solved: Substitution = field(default=EMPTY)
    disequalities: tuple[Disequality, ...] = ()

    def resolve(self, term: Term) -> Term:
        return self.solved.resolve(term)

    def add_equality(self, s: Term, t: Term) -> EqualityStore | None:
        s = evaluate_arithmetic(self.solved.resolve(s))
        t = evaluate_arithmetic(self.solved.resolve(t))
        solved = unify(s, t, self.solved)
        if solved is None:
            return None
        if solved is self.solved:
            return self
        return EqualityStore(solved, ())._with_disequalities(self.disequalities)

    def add_equalities(self, pairs: Iterable[tuple[Term, Term]]) -> EqualityStore | None:
        store: EqualityStore | None = self
        for s, t in pairs:
            store = store.add_equality(s, t)
            if store is None:
                return None
        return store

    def add_disequality(self, universal_vars: Iterable[str], s: Term, t: Term) -> EqualityStore | None:
        return self._with_disequalities([Disequality(frozenset(universal_vars), s, t)])

    def _with_disequalities(self, entries: Iterable[Disequality]) -> EqualityStore | None:
        kept = list(self.disequalities)
        for entry in entries:
            simplified = _simplify(
                entry.universal_vars, self.solved.resolve(entry.lhs), self.solved.resolve(entry.rhs)
            )
            if simplified is None:
                return None
            if simplified is not _TRIVIAL and simplified not in kept:
                kept.append(simplified)
        return EqualityStore(self.solved, tuple(kept))

    @property
    def consistent(self) -> bool:
        # inconsistent stores are never constructed
        return True

    def __str__(self) -> str:
        parts = [f"{name} = {term}" for name, term in sorted(self.solved.items())]
        parts += [str(d) for d in self.disequalities]
        return "{" + ", ".join(parts) + "}"


EMPTY_STORE = EqualityStore()


def store_add_equality(store: EqualityStore, s: Term, t: Term) -> EqualityStore | None:
    """E.1: add ``s = t``; ``None`` signals inconsistency."""
    return store.add_equality(s, t)


def store_add_disequality(
    store: EqualityStore, universal_vars: Iterable[str], s: Term, t: Term
) -> EqualityStore | None:
    """E.4 first branch: add ``forall universal_vars: s != t``; ``None`` signals inconsistency."""
    return store.add_disequality(universal_vars, s, t)
