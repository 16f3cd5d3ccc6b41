import pytest

from repairdb.composer.compose import compose
from repairdb.composer.database import DatabaseInstance
from repairdb.composer.repair import solution_to_repair
from repairdb.config import SearchBudget
from repairdb.engine.derive import (
    Derivation,
    ReplaySelector,
    answer_substitutions,
    derive,
    fresh_constant,
    select_goal,
    select_leftmost,
)
from repairdb.engine.goals import BudgetExhausted, Failure, Floundered, PositiveGoal, Solution, Store
from repairdb.engine.rules import (
    apply_rule_abducible,
    apply_rule_defined,
    apply_rule_equality,
    apply_rule_negation,
    compatible,
)
from repairdb.engine.trace import TraceRecord, TraceRecorder, read_trace
from repairdb.logic.store import EMPTY_STORE
from repairdb.logic.terms import Atom, Compound, Constant, Denial, Literal, Variable, atom_to_term
from repairdb.transform.formula import And, Equals, ForAll, Implies, Pred
from repairdb.transform.lloyd_topor import DenialTheory, lloyd_topor, rewrite_fact_level

__author__ = "gunthergl_r2"
__copyright__ = "gunthergl_r2"
__license__ = "MIT"

X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")


def teaches(course: str, teacher: str) -> Atom:
    return Atom("teaches", (Constant(course), Constant(teacher)))


ONE_TEACHER = ForAll(
    ("X", "Y", "Z"),
    Implies(And((Pred(Atom("teaches", (X, Y))), Pred(Atom("teaches", (X, Z))))), Equals(Y, Z)),
)
SOURCES = [
    DatabaseInstance.from_atoms([teaches("c1", "n1"), teaches("c2", "n2")], "db1"),
    DatabaseInstance.from_atoms([teaches("c2", "n3")], "db2"),
]


@pytest.fixture
def teaches_theory():
    return compose(SOURCES, rewrite_fact_level(lloyd_topor(ONE_TEACHER)))


def repairs_of(outcomes) -> set[str]:
    return {str(solution_to_repair(o.delta, o.equalities)) for o in outcomes if isinstance(o, Solution)}


def test_single_retractions_are_found(teaches_theory):
    outcomes = list(derive(teaches_theory, check_invariants=True))
    found = repairs_of(outcomes)
    assert "({}, {teaches(c2, n3)})" in found
    assert "({}, {teaches(c2, n2)})" in found
    assert not any(isinstance(o, (Failure, Floundered, BudgetExhausted)) for o in outcomes)


def test_consistent_database_needs_no_change():
    theory = compose(SOURCES[:1], rewrite_fact_level(lloyd_topor(ONE_TEACHER)))
    assert repairs_of(derive(theory)) == {"({}, {})"}


def test_unrepairable_theory_fails():
    stored = Literal(Atom("db", (atom_to_term(teaches("c1", "n1")),)))
    theory = compose(SOURCES, DenialTheory(denials=(Denial(frozenset(), (stored,)),)))
    assert list(derive(theory)) == [Failure()]


def test_negation_over_universal_flounders():
    unsafe = Denial(frozenset({"X"}), (Literal(Atom("fact", (X,)), positive=False),))
    theory = compose(SOURCES, DenialTheory(denials=(unsafe,)))
    outcomes = list(derive(theory))
    floundered = [o for o in outcomes if isinstance(o, Floundered)]
    assert len(floundered) == 1
    assert "~fact(X" in str(floundered[0].goal)


def test_step_budget(teaches_theory):
    derivation = Derivation(teaches_theory, SearchBudget(max_steps=1))
    outcomes = list(derivation.run())
    assert outcomes[-1] == BudgetExhausted(1, "max_steps")
    assert derivation.steps.used == 1


def test_leftmost_selection_agrees(teaches_theory):
    assert repairs_of(derive(teaches_theory)) == repairs_of(derive(teaches_theory, selector=select_leftmost))


def test_parallel_exploration_agrees(teaches_theory):
    sequential = repairs_of(Derivation(teaches_theory).run())
    parallel = repairs_of(Derivation(teaches_theory).run_parallel(workers=3))
    assert parallel == sequential


def test_parallel_counters_match_outcomes(teaches_theory):
    sequential = Derivation(teaches_theory)
    expected = sum(isinstance(o, Solution) for o in sequential.run())
    for _ in range(5):
        derivation = Derivation(teaches_theory)
        outcomes = derivation.run_parallel(workers=4)
        assert derivation.n_solutions == sum(isinstance(o, Solution) for o in outcomes) == expected
        assert derivation.n_floundered == 0


def test_replay_reproduces_first_solution(teaches_theory, tmp_path):
    recorder = TraceRecorder()
    first = next(o for o in derive(teaches_theory, recorder=recorder) if isinstance(o, Solution))
    assert recorder.records, "the first solution needs at least one step"
    assert [r.step for r in recorder.records] == list(range(1, len(recorder.records) + 1))

    log = tmp_path / "replay.log"
    recorder.write(log)
    records = read_trace(log)
    assert records == recorder.records

    replayed = next(iter(derive(teaches_theory, selector=ReplaySelector(records))))
    assert isinstance(replayed, Solution)
    assert repairs_of([replayed]) == repairs_of([first])


def test_replay_rejects_wrong_rule(teaches_theory):
    selector = ReplaySelector([TraceRecord(1, "no-such-rule", 0, 0)])
    with pytest.raises(ValueError, match="Replay expected rule"):
        list(derive(teaches_theory, selector=selector))


def test_read_trace_errors():
    with pytest.raises(ValueError, match="Not a trace record"):
        read_trace(["step one rule D.1 goal 0 branch 0"])
    with pytest.raises(ValueError, match="out of sequence"):
        read_trace(["step 2 rule D.1 goal 0 branch 0"])


def test_recorder_keeps_first_path():
    recorder = TraceRecorder()
    first = (TraceRecord(1, "A.1", 0, 0),)
    assert recorder.offer_path(first)
    assert not recorder.offer_path((TraceRecord(1, "A.1", 0, 1),))
    assert recorder.lines() == ["step 1 rule A.1 goal 0 branch 0"]


def test_fresh_constant():
    assert fresh_constant([Constant("a")]) == Constant("fresh")
    assert fresh_constant([Constant("fresh"), Constant("fresh1")]) == Constant("fresh2")


def test_rule_families(teaches_theory):
    derivation = Derivation(teaches_theory)
    state = derivation.initial_state()
    # the one-teacher denial leads with a fact/1 atom
    (unfolded,) = apply_rule_defined(derivation.rules, state, 0)
    assert unfolded.depth == 1
    for wrong in (apply_rule_abducible, apply_rule_negation, apply_rule_equality):
        with pytest.raises(ValueError, match="needs rule D.2"):
            wrong(derivation.rules, state, 0)


def test_abduction_of_a_fresh_atom(teaches_theory):
    derivation = Derivation(teaches_theory)
    inserted = Atom("insert", (atom_to_term(teaches("c3", "n4")),))
    state = derivation.initial_state([Literal(inserted)])
    assert isinstance(state.goals[0], PositiveGoal)
    (abduced,) = apply_rule_abducible(derivation.rules, state, 0)
    assert abduced.store.delta == (inserted,)


def test_select_goal_prefers_deterministic_rules(teaches_theory):
    state = Derivation(teaches_theory).initial_state()
    expansion = select_goal(state, teaches_theory)
    assert expansion.deterministic
    assert (expansion.rule, expansion.goal_index) == ("D.2", 0)


def test_answer_substitutions():
    a = Constant("a")
    solution = Solution(Store(delta=(Atom("insert", (Y,)),), equalities=EMPTY_STORE.add_disequality((), Y, a)))
    groundings = [g["Y"].name for g in answer_substitutions(solution, [a, Constant("b")])]
    assert groundings == ["b", "fresh"]
    assert [g["Y"].name for g in answer_substitutions(solution, [a], include_fresh=False)] == []


@pytest.mark.parametrize(
    "s, t, expected",
    [
        (X, Constant("a"), True),
        (Constant("a"), X, True),
        (Constant("a"), Constant("a"), True),
        (Constant("a"), Constant("b"), False),
        (Compound("f", (X, Constant("a"))), Compound("f", (Constant("b"), Y)), True),
        (Compound("f", (Constant("a"),)), Compound("f", (Constant("b"),)), False),
        (Compound("f", (X,)), Compound("g", (X,)), False),
        (Compound("f", (X,)), Constant("a"), False),
    ],
)
def test_compatible(s, t, expected):
    assert compatible(s, t) is expected
