"""Printing problems, formulas and terms back in surface syntax."""

from __future__ import annotations

from repairdb.io.parser import DEFAULT_SOURCE, ProblemFile
from repairdb.logic.terms import ARITHMETIC_FUNCTORS, Atom, Compound, Term
from repairdb.transform.formula import And, Compare, Equals, Exists, ForAll, Formula, Implies, Not, Or, Pred, Truth


def render_term(term: Term) -> str:
    if isinstance(term, Compound):
        if term.functor in ARITHMETIC_FUNCTORS and len(term.args) == 2:
            left, right = term.args
            right_text = render_term(right)
            if isinstance(right, Compound) and right.functor in ARITHMETIC_FUNCTORS:
                right_text = f"({right_text})"
            return f"{render_term(left)} {term.functor} {right_text}"
        return f"{term.functor}({', '.join(render_term(a) for a in term.args)})"
    return str(term)


def render_atom(atom: Atom) -> str:
    if not atom.args:
        return atom.predicate
    return f"{atom.predicate}({', '.join(render_term(a) for a in atom.args)})"


def _atomic(formula: Formula) -> bool:
    match formula:
        case Pred() | Equals() | Compare() | Truth():
            return True
        case Not(Equals()):
            return True
    return False


def _wrap(formula: Formula) -> str:
    text = render_formula(formula)
    return text if _atomic(formula) else f"({text})"


def render_formula(formula: Formula) -> str:
    """Surface syntax; every non-atomic subformula is parenthesized."""
    match formula:
        case Pred(atom):
            return render_atom(atom)
        case Equals(lhs, rhs):
            return f"{render_term(lhs)} = {render_term(rhs)}"
        case Not(Equals(lhs, rhs)):
            return f"{render_term(lhs)} != {render_term(rhs)}"
        case Compare(op, lhs, rhs):
            return f"{render_term(lhs)} {op} {render_term(rhs)}"
        case Truth(value):
            return "true" if value else "false"
        case Not(body):
            return f"~{_wrap(body)}"
        case And(parts):
            return " & ".join(_wrap(p) for p in parts)
        case Or(parts):
            return " | ".join(_wrap(p) for p in parts)
        case Implies(a, b):
            return f"{_wrap(a)} -> {_wrap(b)}"
        case ForAll(variables, body):
            return f"forall {', '.join(variables)}: {_wrap(body)}"
        case Exists(variables, body):
            return f"exists {', '.join(variables)}: {_wrap(body)}"
    raise TypeError(f"Not a formula: {formula!r}")


def render_problem(problem: ProblemFile) -> str:
    """Text that parses back to ``problem``."""
    lines: list[str] = []
    for block in problem.sources:
        # facts before the first source line belong to the default source
        implicit = block.source_id == DEFAULT_SOURCE and block.trust is None and not lines
        if not (implicit and (block.facts or block.deletions)):
            trust = f" trust {block.trust}" if block.trust is not None else ""
            lines.append(f"source {block.source_id}{trust}.")
        times = dict(block.timestamps)
        for fact in block.facts:
            at = f" @ {times[fact]}" if fact in times else ""
            lines.append(f"fact {render_atom(fact)}{at}.")
        for fact, time in block.deletions:
            lines.append(f"delete {render_atom(fact)} @ {time}.")
    lines += [f"constraint {render_formula(f)}." for f in problem.constraints]
    for name, value in problem.options:
        lines.append(f"option {name}." if value is None else f"option {name} {value}.")
    return "\n".join(lines) + ("\n" if lines else "")
