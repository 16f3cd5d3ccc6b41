import pandas as pd
import pytest

from repairdb.composer.database import DatabaseInstance
from repairdb.config import PreferenceCriterion
from repairdb.exceptions import ProblemSyntaxError, SchemaError
from repairdb.io import (
    load_fact_tables,
    parse_problem,
    read_fact_table,
    read_problem,
    render_formula,
    render_problem,
)
from repairdb.logic.terms import Atom, Compound, Constant, Variable, integer
from repairdb.transform.formula import (
    And,
    Compare,
    Equals,
    Exists,
    ForAll,
    Implies,
    Not,
    Or,
    Pred,
    free_variables,
    subformulas,
    universal_closure,
)

__author__ = "gunthergl_r2"
__copyright__ = "gunthergl_r2"
__license__ = "MIT"


def atom(predicate: str, *args: str) -> Atom:
    return Atom(predicate, tuple(Constant(a) for a in args))


# --------------------------------- Parsing -----------------------------------


def test_parse_sources_and_trust():
    problem = parse_problem(
        """
        % two sources
        source s1 trust 2.
        fact teaches(c1, n1).
        source s2.
        fact teaches(c2, n2).
        fact teaches(c2, n2).
        """
    )
    assert [b.source_id for b in problem.sources] == ["s1", "s2"]
    assert problem.trust == {"s1": 2}
    assert problem.sources[1].facts == (atom("teaches", "c2", "n2"),)


def test_facts_without_source_line():
    problem = parse_problem("fact p(a).\nfact q.\n")
    assert [b.source_id for b in problem.sources] == ["db"]
    assert problem.sources[0].facts == (atom("p", "a"), Atom("q"))


def test_parse_constraint():
    problem = parse_problem("constraint forall X: teacher(X) -> (exists Y: teaches(Y, X)).")
    x, y = Variable("X"), Variable("Y")
    expected = ForAll(
        ("X",),
        Implies(Pred(Atom("teacher", (x,))), Exists(("Y",), Pred(Atom("teaches", (y, x))))),
    )
    assert problem.constraints == (expected,)


def test_parsed_atoms_are_formula_nodes():
    (formula,) = parse_problem("fact p(a).\nconstraint ~(p(X) & q) | r(X).").constraints
    nodes = list(subformulas(formula))
    assert {type(n) for n in nodes} == {Or, Not, And, Pred}
    assert [n.atom for n in nodes if isinstance(n, Pred)] == [
        Atom("p", (Variable("X"),)),
        Atom("q"),
        Atom("r", (Variable("X"),)),
    ]
    assert universal_closure(formula) == ForAll(("X",), formula)


def test_free_variables_rejects_bare_atoms():
    with pytest.raises(TypeError, match="Not a formula node"):
        free_variables(Atom("p", (Variable("X"),)))


def test_parse_comparisons_and_arithmetic():
    (formula,) = parse_problem("constraint forall X, Y: p(X, Y) -> X + 1 <= Y & X != c.").constraints
    x, y = Variable("X"), Variable("Y")
    assert formula.body.consequent.parts == (
        Compare("<=", Compound("+", (x, integer(1))), y),
        Not(Equals(x, Constant("c"))),
    )


def test_parse_timestamps():
    problem = parse_problem("fact p(a) @ 3.\ndelete p(a) @ 5.\n")
    (block,) = problem.sources
    assert block.timestamps == ((atom("p", "a"), 3),)
    assert block.deletions == ((atom("p", "a"), 5),)
    db = block.instance()
    assert db.timestamps == {atom("p", "a"): 3}


def test_two_timestamps_for_one_fact():
    with pytest.raises(SchemaError, match="two timestamps"):
        parse_problem("fact p(a) @ 1.\nfact p(a) @ 2.\n")


def test_syntax_error_position():
    with pytest.raises(ProblemSyntaxError) as info:
        parse_problem("fact p(a).\nconstraint p(a) -> .\n")
    assert info.value.line == 2
    assert info.value.column > 1
    assert str(info.value).startswith("line 2, column ")


def test_fact_must_be_ground():
    with pytest.raises(ProblemSyntaxError, match="not ground"):
        parse_problem("fact p(X).")


def test_arity_clash():
    with pytest.raises(SchemaError, match="line 2"):
        parse_problem("fact p(a).\nconstraint forall X, Y: p(X, Y).\n")


@pytest.mark.parametrize(
    "text, message",
    [
        ("option colour red.", "unknown option colour"),
        ("option sources 3.", "takes no value"),
        ("option criterion.", "takes a value"),
        ("option criterion best.", "unknown criterion"),
    ],
)
def test_option_errors(text, message):
    with pytest.raises(ProblemSyntaxError, match=message):
        parse_problem(text)


def test_run_options():
    problem = parse_problem(
        "option criterion cardinality.\noption sources.\noption max_steps 50.\n"
        "option only_source s1.\noption only_source s2.\noption fresh_constant.\n"
    )
    options = problem.run_options()
    assert options.criterion is PreferenceCriterion.CARDINALITY
    assert options.sources
    assert options.budget.max_steps == 50
    assert options.only_sources == ("s1", "s2")
    assert options.oracle_fresh_constant


def test_run_options_validation():
    with pytest.raises(SchemaError, match="Invalid option value"):
        parse_problem("option max_steps 0.").run_options()


def test_with_databases():
    problem = parse_problem("source s1.\nfact p(a).\n")
    extended = problem.with_databases([DatabaseInstance.from_atoms([atom("p", "b")], "s2")])
    assert [b.source_id for b in extended.sources] == ["s1", "s2"]
    with pytest.raises(SchemaError, match="defined twice"):
        problem.with_databases([DatabaseInstance.from_atoms([], "s1")])


# -------------------------------- Rendering ----------------------------------


def test_render_formula():
    x = Variable("X")
    formula = ForAll(("X",), Implies(Pred(Atom("p", (x,))), Not(Equals(x, Constant("a")))))
    assert render_formula(formula) == "forall X: (p(X) -> X != a)"


def test_render_problem_parses_back(data_dir):
    for path in sorted(data_dir.glob("*.rdb")):
        problem = read_problem(path)
        assert parse_problem(render_problem(problem)) == problem, f"{path.name} changes when rendered"


# ------------------------------- Fact tables ---------------------------------


def test_load_fact_tables(tmp_path):
    (tmp_path / "s1").mkdir()
    (tmp_path / "s2").mkdir()
    first = pd.DataFrame({"course": ["c1", "c2"], "teacher": ["n1", "n2"]})
    first.to_csv(tmp_path / "s1" / "teaches.csv", index=False)
    second = pd.DataFrame({"course": ["c2"], "teacher": ["n3"], "timestamp": [4]})
    second.to_feather(tmp_path / "s2" / "teaches.feather")
    (tmp_path / "s2" / "notes.txt").write_text("ignored")

    s1, s2 = load_fact_tables(tmp_path)
    assert s1.source_id == "s1"
    assert s1.facts == frozenset({atom("teaches", "c1", "n1"), atom("teaches", "c2", "n2")})
    assert s2.timestamps == {atom("teaches", "c2", "n3"): 4}


def test_read_fact_table_values(tmp_path):
    filename = tmp_path / "level.csv"
    pd.DataFrame({"sensor": ["radar"], "value": [10]}).to_csv(filename, index=False)
    facts, times = read_fact_table(filename)
    assert facts == [Atom("level", (Constant("radar"), integer(10)))]
    assert times == {}


def test_read_fact_table_errors(tmp_path):
    missing = tmp_path / "p.csv"
    pd.DataFrame({"a": ["x", None]}).to_csv(missing, index=False)
    with pytest.raises(SchemaError, match="Missing value"):
        read_fact_table(missing)
    with pytest.raises(NotImplementedError, match="Suffix .json"):
        read_fact_table(tmp_path / "p.json")
    with pytest.raises(ValueError, match="must be a directory"):
        load_fact_tables(missing)
