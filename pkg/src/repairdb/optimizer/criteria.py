"""Preference criteria on repairs.

Both criteria are pre-orders. ``leq(r1, r2)`` reads "r1 is at least as good
as r2".
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping

from repairdb.composer.repair import Repair
from repairdb.config import PreferenceCriterion
from repairdb.logic.store import EMPTY_STORE, Disequality
from repairdb.logic.terms import Atom, Compound, Constant, Term, Variable, substitute_term

__all__ = ["PreferenceCriterion", "is_preferred", "leq", "preferred_subset", "strictly_better", "subsumes"]


def _match_term(pattern: Term, target: Term, bindings: dict[str, Term]) -> dict[str, Term] | None:
    # one-way: only pattern variables are bound, target variables stay rigid
    match pattern:
        case Variable(name):
            if name in bindings:
                return bindings if bindings[name] == target else None
            return {**bindings, name: target}
        case Constant():
            return bindings if pattern == target else None
        case Compound(functor, args):
            if not isinstance(target, Compound) or target.functor != functor:
                return None
            return _match_args(args, target.args, bindings)
    raise TypeError(f"Not a term: {pattern!r}")


def _match_args(
    patterns: tuple[Term, ...], targets: tuple[Term, ...], bindings: dict[str, Term]
) -> dict[str, Term] | None:
    if len(patterns) != len(targets):
        return None
    for pattern, target in zip(patterns, targets):
        bindings = _match_term(pattern, target, bindings)
        if bindings is None:
            return None
    return bindings


def _embeddings(
    pending: list[tuple[Atom, frozenset[Atom]]], bindings: dict[str, Term]
) -> Iterator[dict[str, Term]]:
    if not pending:
        yield bindings
        return
    (atom, targets), rest = pending[0], pending[1:]
    for target in sorted(targets, key=str):
        if target.predicate != atom.predicate or target.arity != atom.arity:
            continue
        extended = _match_args(atom.args, target.args, bindings)
        if extended is not None:
            yield from _embeddings(rest, extended)


def _entailed(specific: Repair, residuals: Iterable[Disequality], theta: Mapping[str, Term]) -> bool:
    """Whether every grounding allowed by ``specific`` satisfies the ``theta`` instances of ``residuals``."""
    store = EMPTY_STORE
    for entry in specific.residual_constraints:
        store = store.add_disequality(entry.universal_vars, entry.lhs, entry.rhs)
        if store is None:
            return True
    taken = set(specific.variables()) | {name for d in specific.residual_constraints for name in d.variables()}
    counter = 0
    for entry in residuals:
        local: dict[str, Term] = {}
        for name in sorted(entry.universal_vars | (entry.variables() - set(theta))):
            counter += 1
            while f"_E{counter}" in taken:
                counter += 1
            local[name] = Variable(f"_E{counter}")
        bindings = {**theta, **local}
        # the negation of the disequality must contradict the specific repair's residuals
        if store.add_equality(substitute_term(entry.lhs, bindings), substitute_term(entry.rhs, bindings)) is not None:
            return False
    return True


def subsumes(general: Repair, specific: Repair) -> bool:
    """Whether every instance of ``specific`` contains an instance of ``general``.

    That holds when a substitution ``theta`` of the variables of ``general``
    maps its Insert and Retract sets into those of ``specific`` and the
    residual constraints of ``specific`` entail those of ``general`` under
    ``theta``. On ground repairs this is componentwise inclusion.
    """
    if general.is_ground and not general.residual_constraints:
        return general.insert <= specific.insert and general.retract <= specific.retract
    pending = [(a, specific.insert) for a in sorted(general.insert, key=str)]
    pending += [(a, specific.retract) for a in sorted(general.retract, key=str)]
    return any(_entailed(specific, general.residual_constraints, theta) for theta in _embeddings(pending, {}))


def leq(r1: Repair, r2: Repair, criterion: PreferenceCriterion) -> bool:
    if criterion is PreferenceCriterion.CARDINALITY:
        return r1.size <= r2.size
    return subsumes(r1, r2)


def strictly_better(r1: Repair, r2: Repair, criterion: PreferenceCriterion) -> bool:
    return leq(r1, r2, criterion) and not leq(r2, r1, criterion)


def is_preferred(repair: Repair, all_repairs: Iterable[Repair], criterion: PreferenceCriterion) -> bool:
    """No repair in ``all_repairs`` is strictly better than ``repair``."""
    return not any(strictly_better(other, repair, criterion) for other in all_repairs)


def preferred_subset(repairs: Iterable[Repair], criterion: PreferenceCriterion) -> list[Repair]:
    """The preferred members of a finite set, deduplicated and in canonical order."""
    unique = {r.key(): r for r in repairs}
    candidates = list(unique.values())
    kept = [r for r in candidates if is_preferred(r, candidates, criterion)]
    return sorted(kept, key=Repair.key)
