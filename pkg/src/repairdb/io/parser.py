"""Problem files: sources, facts, constraints and options.

The surface language is line oriented; ``%`` starts a comment::

    source s1 trust 2.
    fact teaches(c1, n1).
    fact observe(object1, t60) @ 3.
    delete observe(object1, t60) @ 5.
    constraint forall X, Y: teaches(X, Y) -> ~(X = c3).
    option criterion cardinality.

Lowercase identifiers are constants and predicates, capitalized ones are
variables. Facts before the first ``source`` line belong to source ``db``.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

from arpeggio import EOF, NoMatch, Optional, ParserPython, PTNodeVisitor, ZeroOrMore, visit_parse_tree
from arpeggio import RegExMatch as _
from pydantic import ValidationError

from repairdb.composer.database import DatabaseInstance, UnifiedDatabase, sorted_atoms
from repairdb.config import PreferenceCriterion, RunOptions, SearchBudget
from repairdb.exceptions import ProblemSyntaxError, SchemaError
from repairdb.logic.terms import Atom, Compound, Constant, Variable, integer
from repairdb.transform.formula import And, Compare, Equals, Exists, ForAll, Formula, Implies, Not, Or, Pred, Truth

logger = logging.getLogger(__name__)

DEFAULT_SOURCE = "db"
KEYWORDS = ("forall", "exists", "true", "false")

# option name -> whether it takes a value
OPTIONS = {
    "criterion": True,
    "sources": False,
    "timestamps": False,
    "max_steps": True,
    "max_delta": True,
    "workers": True,
    "only_source": True,
    "fresh_constant": False,
}


@dataclass(frozen=True)
class SourceBlock:
    """The facts and events listed under one ``source`` line."""

    source_id: str = DEFAULT_SOURCE
    trust: int | None = None
    facts: tuple[Atom, ...] = ()
    timestamps: tuple[tuple[Atom, int], ...] = ()
    deletions: tuple[tuple[Atom, int], ...] = ()

    def instance(self) -> DatabaseInstance:
        return DatabaseInstance(frozenset(self.facts), self.source_id, dict(self.timestamps), self.deletions)

    @classmethod
    def from_instance(cls, db: DatabaseInstance, trust: int | None = None) -> SourceBlock:
        facts = tuple(sorted_atoms(db.facts))
        timestamps = tuple((a, db.timestamps[a]) for a in facts if a in db.timestamps)
        return cls(db.source_id, trust, facts, timestamps, tuple(db.deletions))


@dataclass(frozen=True)
class ProblemFile:
    """A parsed problem: sources, constraints and ``option`` lines in file order."""

    sources: tuple[SourceBlock, ...] = ()
    constraints: tuple[Formula, ...] = ()
    options: tuple[tuple[str, str | None], ...] = field(default=())

    @property
    def is_empty(self) -> bool:
        return not self.sources and not self.constraints

    def databases(self) -> list[DatabaseInstance]:
        return [block.instance() for block in self.sources]

    def unified(self) -> UnifiedDatabase:
        return UnifiedDatabase.from_instances(self.databases(), self.constraints)

    @property
    def trust(self) -> dict[str, int]:
        return {b.source_id: b.trust for b in self.sources if b.trust is not None}

    def with_databases(self, databases: Iterable[DatabaseInstance]) -> ProblemFile:
        """Append further sources, for instance loaded from fact tables."""
        extra = tuple(SourceBlock.from_instance(db) for db in databases)
        taken = {b.source_id for b in self.sources}
        clash = sorted(b.source_id for b in extra if b.source_id in taken)
        if clash:
            raise SchemaError(f"Sources defined twice: {clash}.")
        return ProblemFile(self.sources + extra, self.constraints, self.options)

    def run_options(self, base: RunOptions | None = None) -> RunOptions:
        """``base`` updated by the file's ``option`` lines.

        Raises:
            SchemaError: When an option value is invalid.
        """
        base = base or RunOptions()
        values = base.model_dump()
        budget = dict(values.pop("budget"))
        only: list[str] = []
        for name, value in self.options:
            if name in ("sources", "timestamps"):
                values[name] = True
            elif name == "fresh_constant":
                values["oracle_fresh_constant"] = True
            elif name in ("max_steps", "max_delta"):
                budget[name] = value
            elif name == "only_source":
                only.append(value)
            else:
                values[name] = value
        if only:
            values["only_sources"] = tuple(only)
        try:
            return RunOptions.model_validate({**values, "budget": SearchBudget.model_validate(budget)})
        except ValidationError as e:
            raise SchemaError(f"Invalid option value: {e}") from e


# ------------------------------- Grammar -------------------------------------


def comment():
    return _(r"%[^\n]*")


def number():
    return _(r"-?\d+")


def variable():
    return _(r"[A-Z_][A-Za-z0-9_]*")


def identifier():
    return _(r"(?!(?:{})\b)[a-z][A-Za-z0-9_]*".format("|".join(KEYWORDS)))


def arith_op():
    return _(r"[+-](?!>)")


def cmp_op():
    return _(r"!=|<=|>=|=|<|>")


def term_list():
    return sum_term, ZeroOrMore(",", sum_term)


def compound():
    return identifier, "(", term_list, ")"


def simple_term():
    return [compound, ("(", sum_term, ")"), number, variable, identifier]


def sum_term():
    return simple_term, ZeroOrMore(arith_op, simple_term)


def atom():
    return identifier, Optional("(", term_list, ")")


def comparison():
    return sum_term, cmp_op, sum_term


def truth():
    return _(r"(?:true|false)\b")


def quantifier():
    return _(r"(?:forall|exists)\b")


def variables():
    return variable, ZeroOrMore(",", variable)


def quantified():
    return quantifier, variables, ":", implication


def negation():
    return "~", unary


def parenthesized():
    return "(", implication, ")"


def unary():
    return [negation, quantified, parenthesized, truth, comparison, atom]


def conjunction():
    return unary, ZeroOrMore("&", unary)


def disjunction():
    return conjunction, ZeroOrMore("|", conjunction)


def implication():
    return disjunction, Optional("->", implication)


def trust_level():
    return _(r"trust\b"), number


def at_time():
    return "@", number


def source_decl():
    return _(r"source\b"), identifier, Optional(trust_level), "."


def fact_decl():
    return _(r"fact\b"), atom, Optional(at_time), "."


def delete_decl():
    return _(r"delete\b"), atom, at_time, "."


def constraint_decl():
    return _(r"constraint\b"), implication, "."


def option_value():
    return [number, identifier]


def option_decl():
    return _(r"option\b"), identifier, Optional(option_value), "."


def problem():
    return ZeroOrMore([source_decl, fact_decl, delete_decl, constraint_decl, option_decl]), EOF


# ------------------------------- Visitor -------------------------------------


class _Name(str):
    """An identifier; plain ``str`` children are keywords and punctuation."""


class _Op(str):
    pass


class _Terms(tuple):
    pass


@dataclass(frozen=True)
class _Source:
    source_id: str
    trust: int | None


@dataclass(frozen=True)
class _Fact:
    atom: Atom
    time: int | None
    position: int


@dataclass(frozen=True)
class _Delete:
    atom: Atom
    time: int


@dataclass(frozen=True)
class _Constraint:
    formula: Formula


@dataclass(frozen=True)
class _Option:
    name: str
    value: str | None


def _values(children) -> list:
    flat = []
    for child in children:
        if isinstance(child, list):
            flat.extend(_values(child))
        elif type(child) is not str:
            flat.append(child)
    return flat


class ProblemVisitor(PTNodeVisitor):
    """Builds a :class:`ProblemFile` from the parse tree, checking arities on the way."""

    def __init__(self, parser: ParserPython, **kwargs):
        super().__init__(**kwargs)
        self.parser = parser
        self.arities: dict[str, int] = {}

    def _error(self, message: str, position: int, exc: type[Exception] = ProblemSyntaxError) -> Exception:
        line, column = self.parser.pos_to_linecol(position)
        if exc is ProblemSyntaxError:
            return ProblemSyntaxError(message, line, column)
        return exc(f"line {line}, column {column}: {message}")

    def visit_number(self, node, children):
        return integer(int(node.value))

    def visit_variable(self, node, children):
        return Variable(node.value)

    def visit_identifier(self, node, children):
        return _Name(node.value)

    def visit_arith_op(self, node, children):
        return _Op(node.value)

    visit_cmp_op = visit_arith_op
    visit_quantifier = visit_arith_op

    def visit_term_list(self, node, children):
        return _Terms(_values(children))

    def visit_compound(self, node, children):
        name, args = _values(children)
        return Compound(str(name), tuple(args))

    def visit_simple_term(self, node, children):
        (value,) = _values(children)
        return Constant(str(value)) if isinstance(value, _Name) else value

    def visit_sum_term(self, node, children):
        values = _values(children)
        result = values[0]
        for op, right in zip(values[1::2], values[2::2]):
            result = Compound(str(op), (result, right))
        return result

    def visit_atom(self, node, children):
        name, *rest = _values(children)
        result = Atom(str(name), tuple(rest[0]) if rest else ())
        known = self.arities.setdefault(result.predicate, result.arity)
        if known != result.arity:
            raise self._error(
                f"predicate {result.predicate} used with arity {result.arity}, earlier with {known}",
                node.position,
                SchemaError,
            )
        return result

    def visit_comparison(self, node, children):
        lhs, op, rhs = _values(children)
        if op == "=":
            return Equals(lhs, rhs)
        if op == "!=":
            return Not(Equals(lhs, rhs))
        return Compare(str(op), lhs, rhs)

    def visit_truth(self, node, children):
        return Truth(node.value == "true")

    def visit_variables(self, node, children):
        return _Terms(v.name for v in _values(children))

    def visit_quantified(self, node, children):
        kind, names, body = _values(children)
        return (ForAll if kind == "forall" else Exists)(tuple(names), body)

    def visit_negation(self, node, children):
        (body,) = _values(children)
        return Not(body)

    def visit_parenthesized(self, node, children):
        (body,) = _values(children)
        return body

    def visit_unary(self, node, children):
        (body,) = _values(children)
        # fact and delete lines keep the bare atom
        return Pred(body) if isinstance(body, Atom) else body

    def visit_conjunction(self, node, children):
        parts = _values(children)
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def visit_disjunction(self, node, children):
        parts = _values(children)
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def visit_implication(self, node, children):
        parts = _values(children)
        return parts[0] if len(parts) == 1 else Implies(parts[0], parts[1])

    def visit_trust_level(self, node, children):
        (level,) = _values(children)
        return level.value

    visit_at_time = visit_trust_level

    def visit_source_decl(self, node, children):
        name, *trust = _values(children)
        return _Source(str(name), trust[0] if trust else None)

    def visit_fact_decl(self, node, children):
        fact, *time = _values(children)
        if not fact.is_ground():
            raise self._error(f"fact {fact} is not ground", node.position)
        return _Fact(fact, time[0] if time else None, node.position)

    def visit_delete_decl(self, node, children):
        fact, time = _values(children)
        if not fact.is_ground():
            raise self._error(f"deleted fact {fact} is not ground", node.position)
        return _Delete(fact, time)

    def visit_constraint_decl(self, node, children):
        (formula,) = _values(children)
        return _Constraint(formula)

    def visit_option_value(self, node, children):
        (value,) = _values(children)
        return _Name(str(value))

    def visit_option_decl(self, node, children):
        name, *value = _values(children)
        if name not in OPTIONS:
            raise self._error(f"unknown option {name}", node.position)
        if OPTIONS[name] != bool(value):
            expected = "a value" if OPTIONS[name] else "no value"
            raise self._error(f"option {name} takes {expected}", node.position)
        if name == "criterion" and value[0] not in {c.value for c in PreferenceCriterion}:
            raise self._error(f"unknown criterion {value[0]}", node.position)
        return _Option(str(name), str(value[0]) if value else None)

    def visit_problem(self, node, children):
        return _ProblemBuilder(self).build(_values(children))


class _ProblemBuilder:
    def __init__(self, visitor: ProblemVisitor):
        self.visitor = visitor
        self.blocks: dict[str, dict] = {}
        self.order: list[str] = []
        self.current = DEFAULT_SOURCE

    def block(self, source_id: str) -> dict:
        if source_id not in self.blocks:
            self.order.append(source_id)
            self.blocks[source_id] = {"trust": None, "facts": {}, "timestamps": {}, "deletions": []}
        return self.blocks[source_id]

    def build(self, items: list) -> ProblemFile:
        constraints: list[Formula] = []
        options: list[tuple[str, str | None]] = []
        for item in items:
            match item:
                case _Source(source_id, trust):
                    self.current = source_id
                    block = self.block(source_id)
                    if trust is not None:
                        if block["trust"] not in (None, trust):
                            raise SchemaError(f"Source {source_id} declared with trust {block['trust']} and {trust}.")
                        block["trust"] = trust
                case _Fact(fact, time, position):
                    block = self.block(self.current)
                    block["facts"].setdefault(fact, None)
                    if time is not None:
                        if block["timestamps"].get(fact, time) != time:
                            raise self.visitor._error(
                                f"fact {fact} has two timestamps in source {self.current}", position, SchemaError
                            )
                        block["timestamps"][fact] = time
                case _Delete(fact, time):
                    self.block(self.current)["deletions"].append((fact, time))
                case _Constraint(formula):
                    constraints.append(formula)
                case _Option(name, value):
                    options.append((name, value))
        sources = tuple(
            SourceBlock(
                source_id,
                self.blocks[source_id]["trust"],
                tuple(self.blocks[source_id]["facts"]),
                tuple(self.blocks[source_id]["timestamps"].items()),
                tuple(self.blocks[source_id]["deletions"]),
            )
            for source_id in self.order
        )
        return ProblemFile(sources, tuple(constraints), tuple(options))


_PARSER: ParserPython | None = None
_PARSER_LOCK = threading.Lock()


def _parser() -> ParserPython:
    global _PARSER
    if _PARSER is None:
        _PARSER = ParserPython(problem, comment_def=comment)
    return _PARSER


def _expected(e: NoMatch) -> str:
    names = sorted({getattr(rule, "name", None) or str(rule) for rule in e.rules})
    return " or ".join(names) if names else "end of input"


def parse_problem(text: str) -> ProblemFile:
    """Parse problem text.

    Raises:
        ProblemSyntaxError: On text outside the grammar, with line and column.
        SchemaError: When a predicate is used with two arities.
    """
    # arpeggio parsers keep per-parse state
    with _PARSER_LOCK:
        parser = _parser()
        try:
            tree = parser.parse(text)
        except NoMatch as e:
            line, column = parser.pos_to_linecol(e.position)
            raise ProblemSyntaxError(f"expected {_expected(e)}", line, column) from e
        result = visit_parse_tree(tree, ProblemVisitor(parser))
    if result is None:
        result = ProblemFile()
    logger.debug(
        "parsed %d sources, %d constraints, %d options",
        len(result.sources),
        len(result.constraints),
        len(result.options),
    )
    return result


def read_problem(path: str | Path) -> ProblemFile:
    """Parse a problem file (UTF-8)."""
    return parse_problem(Path(path).read_text(encoding="utf-8"))
