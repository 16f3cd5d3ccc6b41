"""Reading and writing problems and fact tables."""

from repairdb.io.load_facts import load_fact_tables, read_fact_table
from repairdb.io.parser import ProblemFile, SourceBlock, parse_problem, read_problem
from repairdb.io.render import render_atom, render_formula, render_problem, render_term

__all__ = [
    "ProblemFile",
    "SourceBlock",
    "load_fact_tables",
    "parse_problem",
    "read_fact_table",
    "read_problem",
    "render_atom",
    "render_formula",
    "render_problem",
    "render_term",
]
