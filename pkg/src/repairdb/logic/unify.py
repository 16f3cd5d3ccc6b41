"""Substitutions and Martelli-Montanari unification with occurs-check."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from functools import singledispatch
from typing import Any

from repairdb.exceptions import SubstitutionError
from repairdb.logic.terms import (
    Atom,
    Clause,
    Comparison,
    Compound,
    Constant,
    Denial,
    Equality,
    Literal,
    Term,
    Variable,
    substitute_term,
    term_variables,
)


class Substitution(Mapping[str, Term]):
    """Immutable, idempotent map from variable names to terms.

    Every constructor path keeps the solved form: no bound variable occurs in
    any right-hand side.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[str, Term] | None = None):
        self._bindings: dict[str, Term] = dict(bindings or {})

    def __getitem__(self, name: str) -> Term:
        return self._bindings[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Substitution):
            return self._bindings == other._bindings
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{name} ↦ {term}" for name, term in sorted(self._bindings.items()))
        return "{" + inner + "}"

    def resolve(self, term: Term) -> Term:
        return substitute_term(term, self._bindings) if self._bindings else term

    def extend(self, name: str, term: Term) -> Substitution:
        """Add ``name ↦ term``; ``term`` must already be resolved and must not contain ``name``."""
        single = {name: term}
        bindings = {key: substitute_term(value, single) for key, value in self._bindings.items()}
        bindings[name] = term
        return Substitution(bindings)

    def compose(self, other: Substitution) -> Substitution:
        """The substitution that applies ``self`` first and ``other`` afterwards."""
        bindings = {key: other.resolve(value) for key, value in self._bindings.items()}
        for key, value in other.items():
            bindings.setdefault(key, value)
        return Substitution({key: value for key, value in bindings.items() if value != Variable(key)})

    def restrict(self, names: Iterable[str]) -> Substitution:
        keep = set(names)
        return Substitution({key: value for key, value in self._bindings.items() if key in keep})


EMPTY = Substitution()


def _occurs(name: str, term: Term) -> bool:
    return any(var == name for var in term_variables(term))


def unify(
    s: Term,
    t: Term,
    substitution: Substitution | None = None,
    prefer: frozenset[str] = frozenset(),
) -> Substitution | None:
    """Most general unifier of ``s`` and ``t`` extending ``substitution``.

    Args:
        s (Term): Left term.
        t (Term): Right term.
        substitution (Substitution, optional): Bindings already in force.
        prefer (frozenset[str]): Variables to bind first when two variables
            meet; the engine passes the universal variables of a denial so
            the solved form binds them rather than free variables.

    Returns:
        Substitution | None: The idempotent mgu, or ``None`` when none exists.
    """
    return unify_pairs([(s, t)], substitution, prefer)


def unify_pairs(
    pairs: Iterable[tuple[Term, Term]],
    substitution: Substitution | None = None,
    prefer: frozenset[str] = frozenset(),
) -> Substitution | None:
    sub = substitution if substitution is not None else EMPTY
    stack = list(pairs)
    stack.reverse()
    while stack:
        left, right = stack.pop()
        left, right = sub.resolve(left), sub.resolve(right)
        if left == right:
            continue
        match left, right:
            case Variable(), Variable():
                if right.name in prefer and left.name not in prefer:
                    left, right = right, left
                sub = sub.extend(left.name, right)
            case Variable(), _:
                if _occurs(left.name, right):
                    return None
                sub = sub.extend(left.name, right)
            case _, Variable():
                if _occurs(right.name, left):
                    return None
                sub = sub.extend(right.name, left)
            case Compound(), Compound():
                if left.functor != right.functor or len(left.args) != len(right.args):
                    return None
                stack.extend(reversed(list(zip(left.args, right.args))))
            case _:
                # distinct constants, or constant against compound
                return None
    return sub


def unify_atoms(a: Atom, b: Atom, substitution: Substitution | None = None) -> Substitution | None:
    if a.signature != b.signature:
        return None
    return unify_pairs(zip(a.args, b.args), substitution)


def apply(sub: Substitution, x: Any) -> Any:
    """Simultaneously replace the variables bound by ``sub`` inside ``x``.

    Raises:
        SubstitutionError: When ``x`` is a :class:`Denial` and ``sub`` binds
            one of its universal variables or maps a free variable onto a term
            mentioning one of them.
    """
    return _apply(x, sub)


@singledispatch
def _apply(x: Any, sub: Substitution) -> Any:
    raise TypeError(f"Cannot apply a substitution to {type(x).__name__}.")


@_apply.register(Variable)
@_apply.register(Constant)
@_apply.register(Compound)
def _apply_term(x: Term, sub: Substitution) -> Term:
    return sub.resolve(x)


@_apply.register
def _apply_atom(x: Atom, sub: Substitution) -> Atom:
    return x.substitute(sub)


@_apply.register
def _apply_literal(x: Literal, sub: Substitution) -> Literal:
    return x.substitute(sub)


@_apply.register
def _apply_equality(x: Equality, sub: Substitution) -> Equality:
    return x.substitute(sub)


@_apply.register
def _apply_comparison(x: Comparison, sub: Substitution) -> Comparison:
    return x.substitute(sub)


@_apply.register
def _apply_clause(x: Clause, sub: Substitution) -> Clause:
    return Clause(x.head.substitute(sub), tuple(lit.substitute(sub) for lit in x.body))


@_apply.register
def _apply_denial(x: Denial, sub: Substitution) -> Denial:
    captured = x.universal_vars & set(sub)
    if captured:
        raise SubstitutionError(f"Substitution binds universal variables {sorted(captured)} of {x}.")
    for name in x.free_vars & set(sub):
        leaked = x.universal_vars & set(term_variables(sub[name]))
        if leaked:
            raise SubstitutionError(f"Binding of {name} captures universal variables {sorted(leaked)} of {x}.")
    return Denial(x.universal_vars, tuple(lit.substitute(sub) for lit in x.body))
