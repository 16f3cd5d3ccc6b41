import random

import pytest

from repairdb.composer.repair import Repair
from repairdb.config import PreferenceCriterion, RunOptions, SearchBudget
from repairdb.exceptions import OracleError
from repairdb.io.parser import parse_problem
from repairdb.logic.store import Disequality
from repairdb.logic.terms import Atom, Constant, Variable
from repairdb.optimizer.criteria import strictly_better
from repairdb.optimizer.search import RepairSearch
from repairdb.oracle.valuation import AtomUniverse, herbrand_min_model, satisfies
from repairdb.pipeline import CheckResult, build_theory, check, prepare_constraints, repair_groundings, run, run_oracle
from repairdb.report import RepairReport

__author__ = "gunthergl_r2"
__copyright__ = "gunthergl_r2"
__license__ = "MIT"


def repairs_of(report: RepairReport) -> list[str]:
    return [str(r) for r in report.repairs]


@pytest.mark.parametrize("criterion", list(PreferenceCriterion))
def test_teaches(load_example, criterion):
    report = run(load_example("teaches"), RunOptions(criterion=criterion))
    assert report.status == "complete"
    assert repairs_of(report) == ["({}, {teaches(c2, n2)})", "({}, {teaches(c2, n3)})"]


def test_supply(load_example):
    assert repairs_of(run(load_example("supply"))) == ["({}, {class(i2, t1)})", "({}, {supply(c2, d2, i2)})"]


def test_inclusion_dependency(load_example):
    assert repairs_of(run(load_example("pq"))) == ["({}, {p(b)})", "({q(b)}, {})"]


def test_propositional(load_example):
    assert repairs_of(run(load_example("propositional"))) == ["({}, {p})", "({q}, {})"]


def test_unsafe_constraint_is_guarded(load_example):
    assert repairs_of(run(load_example("coverage"))) == ["({q(b)}, {})"]


def test_consistent_and_empty(load_example):
    assert repairs_of(run(load_example("consistent"))) == ["({}, {})"]
    assert repairs_of(run(parse_problem(""))) == ["({}, {})"]


def test_trusted_sensor_wins(load_example):
    report = run(load_example("sensors"))
    assert [(r.insert, r.retract) for r in report.repairs] == [
        ([], ["observe(object1, t60)", "observe(object1, t80)"])
    ]


def test_only_trusted_sources(load_example):
    report = run(load_example("teaches"), RunOptions(only_sources=("db1",)))
    assert repairs_of(report) == ["({}, {})"]


def test_timestamped_updates(load_example):
    report = run(load_example("birth_day"))
    assert report.complete
    assert report.repairs
    for record in report.repairs:
        assert record.insert == []
        assert len(record.retract) == 1
        assert record.retract[0].startswith("at(birth_day(john, d")


def test_non_ground_repair(load_example):
    report = run(load_example("courses"), RunOptions(ground=True))
    # n3 loses course c2 and gets a course other than c1 and c2
    record = next(r for r in report.repairs if r.insert == ["teaches(_V1, n3)"])
    assert record.retract == ["teaches(c2, n3)"]
    assert set(record.where) == {"_V1 != c1", "_V1 != c2"}
    assert {"_V1": "fresh"} in record.groundings
    assert {"_V1": "c1"} not in record.groundings


def test_inclusion_repairs_do_not_dominate_each_other(load_example):
    search = RepairSearch(build_theory(load_example("courses"), RunOptions()), PreferenceCriterion.INCLUSION)
    search.compute()
    assert search.status == "complete"
    repairs = search.repairs
    dominated = [(str(a), str(b)) for a in repairs for b in repairs if strictly_better(a, b, search.criterion)]
    assert dominated == []
    assert "({teaches(_V1, n3)}, {teaches(c2, n3)}) where _V1 != c1, _V1 != c2" in map(str, repairs)


def test_budget_status(load_example):
    options = RunOptions(budget=SearchBudget(max_steps=1))
    assert run(load_example("teaches"), options).status == "budget_exhausted"


def test_sources_and_timestamps_exclude_each_other(load_example):
    with pytest.raises(ValueError, match="cannot be combined"):
        build_theory(load_example("teaches"), RunOptions(sources=True, timestamps=True))


def test_domain_predicate(load_example):
    lines = prepare_constraints(load_example("coverage")).listing().splitlines()
    assert "dom(a)." in lines and "dom(b)." in lines
    assert "forall X: <- dom(X) & ~fact(q(X))" in lines

    clashing = prepare_constraints(parse_problem("fact dom(a).\nconstraint forall X: q(X).\n"))
    assert "dom_1(a)." in clashing.listing().splitlines()


def test_repair_groundings():
    y = Variable("Y")
    repair = Repair(frozenset({Atom("p", (y,))}), residual_constraints=(Disequality(frozenset(), y, Constant("a")),))
    found = [g["Y"].name for g in repair_groundings(repair, [Constant("a"), Constant("b")])]
    assert found == ["b", "fresh"]
    assert [g["Y"].name for g in repair_groundings(repair, [Constant("a")], include_fresh=False)] == []


# --------------------------------- Oracle ------------------------------------


def test_run_oracle(load_example):
    assert repairs_of(run_oracle(load_example("pq"))) == ["({}, {p(b)})", "({q(b)}, {})"]
    assert repairs_of(run_oracle(load_example("consistent"))) == ["({}, {})"]
    report = run_oracle(load_example("propositional"), RunOptions(all_repairs=True))
    assert len(report.repairs) == 6
    assert report.stats.models == 6


def test_run_oracle_limits(load_example):
    with pytest.raises(OracleError, match="cap"):
        run_oracle(load_example("courses"))
    with pytest.raises(OracleError, match="plain composer"):
        run_oracle(load_example("sensors"))


@pytest.mark.parametrize("name", ["pq", "propositional", "coverage", "consistent"])
def test_check_examples(load_example, name):
    result = check(load_example(name))
    assert result.ok, result.to_text()
    assert result.to_text() == f"engine and oracle agree on {len(result.oracle.repairs)} repairs"


def test_check_report_differences():
    empty = RepairReport(repairs=[])
    result = CheckResult(empty, empty, ("({}, {p})",), ("({q}, {})",))
    assert not result.ok
    assert result.to_text().splitlines() == ["only the oracle found: ({}, {p})", "only the engine found: ({q}, {})"]


# ----------------------------- Random instances ------------------------------

PREDICATES = ("p", "q", "r")
CONSTANTS = ("a", "b", "c")


def random_constraint(rng: random.Random) -> str:
    first, second, third = rng.sample(PREDICATES, 3)
    templates = [
        f"forall X: {first}(X) -> {second}(X)",
        f"forall X: ~({first}(X) & {second}(X))",
        f"forall X: {first}(X) -> ~{second}(X)",
        f"forall X: {first}(X) -> {second}(X) | {third}(X)",
        f"forall X: {first}(X) & {second}(X) -> {third}(X)",
        f"forall X: {first}(X) | {second}(X)",
    ]
    return rng.choice(templates)


def random_problem(rng: random.Random) -> str:
    constants = CONSTANTS[: rng.randint(2, 3)]
    lines = [f"fact {p}({c})." for p in PREDICATES for c in constants if rng.random() < 0.4]
    # keep every predicate and constant in the schema and active domain
    lines += [f"fact {PREDICATES[0]}({constants[-1]}).", f"fact {PREDICATES[1]}({constants[0]})."]
    lines += [f"constraint {random_constraint(rng)}." for _ in range(rng.randint(1, 3))]
    return "\n".join(lines) + "\n"


def test_random_instances_agree_with_oracle():
    rng = random.Random(31)
    for _ in range(200):
        text = random_problem(rng)
        problem = parse_problem(text)
        db = problem.unified()
        universe = AtomUniverse.for_database(db)
        for criterion in PreferenceCriterion:
            result = check(problem, RunOptions(criterion=criterion))
            assert result.engine.status == "complete", text
            assert result.ok, f"{criterion.value} on\n{text}\n{result.to_text()}"
            for record in result.engine.repairs:
                repaired = (db.facts | set(map(_atom, record.insert))) - set(map(_atom, record.retract))
                assert satisfies(herbrand_min_model(repaired, universe), db.constraints, universe.domain), (
                    f"{record} does not restore consistency of\n{text}"
                )


def _atom(text: str) -> Atom:
    name, _, rest = text.partition("(")
    return Atom(name, tuple(Constant(c.strip()) for c in rest.rstrip(")").split(",")) if rest else ())


BINARY_TEMPLATES = (
    "forall X, Y, Z: e(X, Y) & e(X, Z) -> Y = Z",
    "forall X: p(X) -> (exists Y: e(X, Y))",
    "forall X, Y: e(X, Y) -> q(Y)",
    "forall X, Y: ~(e(X, Y) & p(Y))",
    "forall X: p(X) -> ~e(X, X)",
)


def random_binary_problem(rng: random.Random) -> str:
    pairs = [(x, y) for x in CONSTANTS[:2] for y in CONSTANTS[:2]]
    lines = [f"fact e({x}, {y})." for x, y in pairs if rng.random() < 0.3]
    lines += [f"fact {p}({c})." for p in ("p", "q") for c in CONSTANTS[:2] if rng.random() < 0.4]
    lines += [f"constraint {c}." for c in rng.sample(BINARY_TEMPLATES, rng.randint(1, 3))]
    return "\n".join(lines) + "\n"


def test_random_binary_instances_agree_with_oracle():
    rng = random.Random(47)
    for _ in range(80):
        text = random_binary_problem(rng)
        problem = parse_problem(text)
        for criterion in PreferenceCriterion:
            options = RunOptions(criterion=criterion, budget=SearchBudget(max_delta=20))
            result = check(problem, options)
            assert result.engine.status == "complete", text
            assert result.ok, f"{criterion.value} on\n{text}\n{result.to_text()}"

            search = RepairSearch(build_theory(problem, options), criterion, options.budget)
            search.compute()
            repairs = search.repairs
            assert not [(a, b) for a in repairs for b in repairs if strictly_better(a, b, criterion)], text
