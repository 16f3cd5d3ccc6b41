"""Terms, atoms, literals, denials and clauses.

Everything here is an immutable value object. Variables are plain names;
whether a variable is universally quantified or free (a Skolem placeholder)
is decided by the enclosing :class:`Denial`, never by the variable itself.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Union

ARITHMETIC_FUNCTORS = frozenset({"+", "-"})
COMPARISON_OPERATORS = ("<", "<=", ">", ">=")
NEGATED_COMPARISON = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Constant:
    name: str

    @property
    def is_integer(self) -> bool:
        return self.name.lstrip("-").isdigit()

    @property
    def value(self) -> int:
        if not self.is_integer:
            raise ValueError(f"Constant {self.name} is not an integer.")
        return int(self.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple[Term, ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("Compound terms need at least one argument; use Constant for zero-ary terms.")

    def __str__(self) -> str:
        if self.functor in ARITHMETIC_FUNCTORS and len(self.args) == 2:
            return f"{self.args[0]} {self.functor} {self.args[1]}"
        return f"{self.functor}({', '.join(str(a) for a in self.args)})"


Term = Union[Variable, Constant, Compound]


def integer(value: int) -> Constant:
    return Constant(str(value))


def term_variables(term: Term) -> Iterator[str]:
    """Variable names of ``term`` in order of first occurrence (with repeats)."""
    if isinstance(term, Variable):
        yield term.name
    elif isinstance(term, Compound):
        for arg in term.args:
            yield from term_variables(arg)


def is_ground(term: Term) -> bool:
    return next(term_variables(term), None) is None


def has_arithmetic(term: Term) -> bool:
    if isinstance(term, Compound):
        return term.functor in ARITHMETIC_FUNCTORS or any(has_arithmetic(a) for a in term.args)
    return False


def evaluate_arithmetic(term: Term) -> Term:
    """Fold ground ``+``/``-`` subterms over integer constants."""
    if not isinstance(term, Compound):
        return term
    args = tuple(evaluate_arithmetic(a) for a in term.args)
    if term.functor in ARITHMETIC_FUNCTORS and len(args) == 2:
        left, right = args
        if isinstance(left, Constant) and isinstance(right, Constant) and left.is_integer and right.is_integer:
            result = left.value + right.value if term.functor == "+" else left.value - right.value
            return integer(result)
    return Compound(term.functor, args)


def substitute_term(term: Term, bindings: Mapping[str, Term]) -> Term:
    if isinstance(term, Variable):
        return bindings.get(term.name, term)
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(substitute_term(a, bindings) for a in term.args))
    return term


def term_constants(term: Term) -> Iterator[Constant]:
    if isinstance(term, Constant):
        yield term
    elif isinstance(term, Compound):
        for arg in term.args:
            yield from term_constants(arg)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return self.predicate, len(self.args)

    def variables(self) -> Iterator[str]:
        for arg in self.args:
            yield from term_variables(arg)

    def is_ground(self) -> bool:
        return next(self.variables(), None) is None

    def substitute(self, bindings: Mapping[str, Term]) -> Atom:
        if not bindings:
            return self
        return Atom(self.predicate, tuple(substitute_term(a, bindings) for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(str(a) for a in self.args)})"


def atom_to_term(atom: Atom) -> Term:
    """Reify an atom so it can be an argument of ``db``/``fact``/``insert``/``retract``."""
    if not atom.args:
        return Constant(atom.predicate)
    return Compound(atom.predicate, atom.args)


def term_to_atom(term: Term) -> Atom:
    if isinstance(term, Constant):
        return Atom(term.name)
    if isinstance(term, Compound):
        return Atom(term.functor, term.args)
    raise ValueError(f"Cannot read variable {term} as an atom.")


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def variables(self) -> Iterator[str]:
        return self.atom.variables()

    def substitute(self, bindings: Mapping[str, Term]) -> Literal:
        return Literal(self.atom.substitute(bindings), self.positive)

    def negate(self) -> Literal:
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"~{self.atom}"


@dataclass(frozen=True)
class Equality:
    """``lhs = rhs`` when positive, ``lhs != rhs`` otherwise."""

    lhs: Term
    rhs: Term
    positive: bool = True

    def variables(self) -> Iterator[str]:
        yield from term_variables(self.lhs)
        yield from term_variables(self.rhs)

    def substitute(self, bindings: Mapping[str, Term]) -> Equality:
        return Equality(substitute_term(self.lhs, bindings), substitute_term(self.rhs, bindings), self.positive)

    def negate(self) -> Equality:
        return Equality(self.lhs, self.rhs, not self.positive)

    def __str__(self) -> str:
        return f"{self.lhs} {'=' if self.positive else '!='} {self.rhs}"


@dataclass(frozen=True)
class Comparison:
    """Integer comparison, decided only once both sides are ground."""

    op: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.op not in COMPARISON_OPERATORS:
            raise ValueError(f"Unknown comparison operator {self.op!r}.")

    def variables(self) -> Iterator[str]:
        yield from term_variables(self.lhs)
        yield from term_variables(self.rhs)

    def substitute(self, bindings: Mapping[str, Term]) -> Comparison:
        return Comparison(self.op, substitute_term(self.lhs, bindings), substitute_term(self.rhs, bindings))

    def negate(self) -> Comparison:
        return Comparison(NEGATED_COMPARISON[self.op], self.lhs, self.rhs)

    def is_ground(self) -> bool:
        return next(self.variables(), None) is None

    def evaluate(self) -> bool:
        left = evaluate_arithmetic(self.lhs)
        right = evaluate_arithmetic(self.rhs)
        if not (isinstance(left, Constant) and isinstance(right, Constant) and left.is_integer and right.is_integer):
            raise ValueError(f"Comparison {self} is not over ground integers.")
        a, b = left.value, right.value
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[self.op]

    def __str__(self) -> str:
        return f"{self.lhs} {self.op} {self.rhs}"


BodyLiteral = Union[Literal, Equality, Comparison]


def body_variables(body: Iterable[BodyLiteral]) -> tuple[str, ...]:
    """Distinct variable names of a conjunction, in order of first occurrence."""
    seen: dict[str, None] = {}
    for literal in body:
        for name in literal.variables():
            seen.setdefault(name, None)
    return tuple(seen)


def render_conjunction(body: Iterable[BodyLiteral]) -> str:
    parts = [str(lit) for lit in body]
    return " & ".join(parts) if parts else "true"


@dataclass(frozen=True)
class Denial:
    """``forall universal_vars: <- body``.

    Body variables outside ``universal_vars`` are free. ``universal_vars`` is
    trimmed to the variables that actually occur in the body.
    """

    universal_vars: frozenset[str]
    body: tuple[BodyLiteral, ...]

    def __post_init__(self):
        occurring = frozenset(body_variables(self.body))
        object.__setattr__(self, "universal_vars", frozenset(self.universal_vars) & occurring)

    @property
    def free_vars(self) -> frozenset[str]:
        return frozenset(body_variables(self.body)) - self.universal_vars

    @property
    def is_false(self) -> bool:
        return not self.body

    def __str__(self) -> str:
        prefix = f"forall {', '.join(sorted(self.universal_vars))}: " if self.universal_vars else ""
        return f"{prefix}<- {render_conjunction(self.body)}"


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[BodyLiteral, ...] = field(default=())

    def variables(self) -> tuple[str, ...]:
        seen = dict.fromkeys(self.head.variables())
        for name in body_variables(self.body):
            seen.setdefault(name, None)
        return tuple(seen)

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} <- {render_conjunction(self.body)}."
