"""Three-valued valuations over a finite atom universe and formula evaluation."""

from __future__ import annotations

import functools
import itertools
import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

import pandas as pd

from repairdb.composer.database import UnifiedDatabase
from repairdb.engine.derive import fresh_constant as new_constant
from repairdb.exceptions import OracleError
from repairdb.logic.terms import (
    Atom,
    BodyLiteral,
    Comparison,
    Constant,
    Equality,
    Literal,
    Term,
    body_variables,
    evaluate_arithmetic,
    substitute_term,
)
from repairdb.logic.unify import unify_atoms
from repairdb.oracle.truth import TruthValue, from_bool, join, join_all, k_leq, meet_all
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
    universal_closure,
)
from repairdb.transform.lloyd_topor import DenialTheory

logger = logging.getLogger(__name__)

DEFAULT_CAP = 16


@dataclass(frozen=True)
class AtomUniverse:
    """All ground atoms of a schema over a finite domain, in a fixed order."""

    atoms: tuple[Atom, ...]
    domain: tuple[Constant, ...]

    @classmethod
    def from_schema(cls, schema: Mapping[str, int], domain: Iterable[Constant]) -> AtomUniverse:
        domain = tuple(sorted(set(domain), key=lambda c: c.name))
        atoms = [
            Atom(predicate, args)
            for predicate in sorted(schema)
            for args in itertools.product(domain, repeat=schema[predicate])
        ]
        return cls(tuple(atoms), domain)

    @classmethod
    def for_database(cls, db: UnifiedDatabase, fresh_constant: bool = False) -> AtomUniverse:
        """The universe of ``db``'s schema over its active domain, optionally plus one fresh constant."""
        domain = list(db.active_domain)
        if fresh_constant:
            domain.append(new_constant(domain))
        return cls.from_schema(db.schema, domain)

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self._index

    @functools.cached_property
    def _index(self) -> frozenset[Atom]:
        return frozenset(self.atoms)

    def check_cap(self, cap: int = DEFAULT_CAP) -> None:
        if len(self.atoms) > cap:
            raise OracleError(f"Atom universe has {len(self.atoms)} atoms, the oracle cap is {cap}.")


class Valuation(Mapping[Atom, TruthValue]):
    """Immutable assignment of truth values; atoms outside the universe are ``f``."""

    __slots__ = ("_values", "_hash")

    def __init__(self, values: Mapping[Atom, TruthValue]):
        self._values = dict(values)
        self._hash = hash(frozenset(self._values.items()))

    def __getitem__(self, atom: Atom) -> TruthValue:
        return self._values[atom]

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Valuation):
            return self._values == other._values
        return NotImplemented

    def value_of(self, atom: Atom) -> TruthValue:
        return self._values.get(atom, TruthValue.F)

    def atoms_with(self, value: TruthValue) -> frozenset[Atom]:
        return frozenset(a for a, v in self._values.items() if v is value)

    @property
    def true_atoms(self) -> frozenset[Atom]:
        return self.atoms_with(TruthValue.T)

    @property
    def top_atoms(self) -> frozenset[Atom]:
        return self.atoms_with(TruthValue.TOP)

    @property
    def is_two_valued(self) -> bool:
        return not self.top_atoms

    def k_leq(self, other: Valuation) -> bool:
        """Pointwise knowledge order."""
        return all(k_leq(v, other.value_of(a)) for a, v in self._values.items())

    def key(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted((str(a), v.value) for a, v in self._values.items()))

    def __str__(self) -> str:
        return "{" + ", ".join(f"{a}:{v}" for a, v in self.key()) + "}"

    __repr__ = __str__


def herbrand_min_model(facts: Iterable[Atom], universe: AtomUniverse) -> Valuation:
    """Facts are ``t``, every other atom of the universe ``f``."""
    facts = frozenset(facts)
    missing = [a for a in facts if a not in universe]
    if missing:
        raise OracleError(f"Facts outside the atom universe: {sorted(map(str, missing))}.")
    return Valuation({a: from_bool(a in facts) for a in universe})


def knowledge_join(hd: Valuation, m: Valuation) -> Valuation:
    """Pointwise ⊕ of two valuations over the same universe."""
    if set(hd) != set(m):
        raise ValueError("knowledge_join needs valuations over the same universe.")
    return Valuation({a: join(v, m[a]) for a, v in hd.items()})


def _ground(term: Term, env: Mapping[str, Term]) -> Term:
    return evaluate_arithmetic(substitute_term(term, env))


def _compare(op: str, lhs: Term, rhs: Term) -> bool:
    try:
        return Comparison(op, lhs, rhs).evaluate()
    except ValueError:
        return False


def eval3(
    v: Valuation, formula: Formula, domain: Iterable[Constant], env: Mapping[str, Term] | None = None
) -> TruthValue:
    """Truth value of ``formula`` under ``v``; quantifiers range over ``domain``.

    Connectives are the truth-order lattice operations, ``a -> b`` is
    ``~a | b``. Equality between constants is syntactic identity.
    """
    domain = tuple(domain)
    env = dict(env or {})

    def ev(f: Formula, env: dict[str, Term]) -> TruthValue:
        match f:
            case Pred(atom):
                return v.value_of(Atom(atom.predicate, tuple(_ground(t, env) for t in atom.args)))
            case Equals(lhs, rhs):
                return from_bool(_ground(lhs, env) == _ground(rhs, env))
            case Compare(op, lhs, rhs):
                return from_bool(_compare(op, _ground(lhs, env), _ground(rhs, env)))
            case Truth(value):
                return from_bool(value)
            case Not(body):
                return ~ev(body, env)
            case And(parts):
                return meet_all(ev(p, env) for p in parts)
            case Or(parts):
                return join_all(ev(p, env) for p in parts)
            case Implies(a, b):
                return ~ev(a, env) | ev(b, env)
            case ForAll(variables, body):
                return meet_all(ev(body, {**env, **dict(zip(variables, c))}) for c in _choices(variables, domain))
            case Exists(variables, body):
                return join_all(ev(body, {**env, **dict(zip(variables, c))}) for c in _choices(variables, domain))
        raise TypeError(f"Not a formula: {f!r}")

    return ev(formula, env)


def _choices(variables: tuple[str, ...], domain: tuple[Constant, ...]) -> Iterator[tuple[Constant, ...]]:
    return itertools.product(domain, repeat=len(variables))


def satisfies(v: Valuation, formulas: Iterable[Formula], domain: Iterable[Constant]) -> bool:
    """Every formula evaluates to a designated value."""
    domain = tuple(domain)
    return all(eval3(v, universal_closure(f), domain).designated for f in formulas)


def two_valued_models(
    ics: Iterable[Formula], universe: AtomUniverse, cap: int = DEFAULT_CAP
) -> Iterator[Valuation]:
    """All two-valued valuations of ``universe`` satisfying every constraint.

    Raises:
        OracleError: When the universe has more than ``cap`` atoms.
    """
    universe.check_cap(cap)
    ics = tuple(ics)
    n = 0
    for bits in itertools.product((TruthValue.F, TruthValue.T), repeat=len(universe)):
        candidate = Valuation(dict(zip(universe.atoms, bits)))
        if satisfies(candidate, ics, universe.domain):
            n += 1
            yield candidate
    logger.debug("%d two-valued models over %d atoms", n, len(universe))


def models_frame(valuations: Iterable[Valuation], universe: AtomUniverse) -> pd.DataFrame:
    """One row per valuation, one column per atom of ``universe``."""
    rows = [[v.value_of(a).value for a in universe] for v in valuations]
    return pd.DataFrame(rows, columns=[str(a) for a in universe])


# ------------------------- Denial theories ---------------------------------


class _DenialTheoryModel:
    """Ground evaluation of a denial theory: user atoms from ``facts``,
    auxiliary predicates by the completion of their (non-recursive) clauses.
    """

    def __init__(self, theory: DenialTheory, facts: Iterable[Atom], domain: Iterable[Constant]):
        self.theory = theory
        self.facts = frozenset(facts)
        self.domain = tuple(domain)
        self.defined = {c.head.predicate for c in theory.auxiliary_clauses}
        self._derived: dict[Atom, bool] = {}

    def holds_atom(self, atom: Atom) -> bool:
        if atom.predicate not in self.defined:
            return atom in self.facts
        if atom not in self._derived:
            self._derived[atom] = self._derive(atom)
        return self._derived[atom]

    def _derive(self, atom: Atom) -> bool:
        for clause in self.theory.auxiliary_clauses:
            bindings = unify_atoms(clause.head, atom)
            if bindings is not None and self.satisfiable(clause.body, dict(bindings)):
                return True
        return False

    def holds_literal(self, literal: BodyLiteral, env: Mapping[str, Term]) -> bool:
        match literal:
            case Literal(atom, positive):
                ground = Atom(atom.predicate, tuple(_ground(t, env) for t in atom.args))
                return self.holds_atom(ground) == positive
            case Equality(lhs, rhs, positive):
                return (_ground(lhs, env) == _ground(rhs, env)) == positive
            case Comparison(op, lhs, rhs):
                return _compare(op, _ground(lhs, env), _ground(rhs, env))
        raise TypeError(f"Not a body literal: {literal!r}")

    def satisfiable(self, body: tuple[BodyLiteral, ...], env: dict[str, Term]) -> bool:
        """Some assignment of the body's remaining variables makes every literal true."""
        open_vars = tuple(name for name in body_variables(body) if name not in env)
        for choice in _choices(open_vars, self.domain):
            local = {**env, **dict(zip(open_vars, choice))}
            if all(self.holds_literal(lit, local) for lit in body):
                return True
        return False

    def holds(self) -> bool:
        return not any(self.satisfiable(d.body, {}) for d in self.theory.denials)


def denial_theory_holds(theory: DenialTheory, facts: Iterable[Atom], domain: Iterable[Constant]) -> bool:
    """Whether ``facts`` violate none of ``theory``'s denials.

    Auxiliary predicates are interpreted by the completion of their defining
    clauses; variables range over ``domain``.
    """
    return _DenialTheoryModel(theory, facts, domain).holds()
