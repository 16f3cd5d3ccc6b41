import pytest

from repairdb.composer.compose import compose, compose_with_sources, compose_with_timestamps, trust_denials
from repairdb.composer.database import DatabaseInstance, UnifiedDatabase
from repairdb.composer.repair import Repair, apply_repair, ground_repair, solution_to_repair
from repairdb.exceptions import SchemaError, SubstitutionError
from repairdb.logic.store import EMPTY_STORE
from repairdb.logic.terms import Atom, Compound, Constant, Variable, atom_to_term
from repairdb.logic.unify import Substitution
from repairdb.transform.formula import And, Equals, ForAll, Implies, Pred
from repairdb.transform.lloyd_topor import lloyd_topor, rewrite_fact_level

__author__ = "gunthergl_r2"
__copyright__ = "gunthergl_r2"
__license__ = "MIT"

X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")


def teaches(course, teacher) -> Atom:
    return Atom("teaches", (Constant(course) if isinstance(course, str) else course, Constant(teacher)))


DB1 = DatabaseInstance.from_atoms([teaches("c1", "n1"), teaches("c2", "n2")], "db1")
DB2 = DatabaseInstance.from_atoms([teaches("c2", "n3")], "db2")
ONE_TEACHER = ForAll(
    ("X", "Y", "Z"),
    Implies(And((Pred(Atom("teaches", (X, Y))), Pred(Atom("teaches", (X, Z))))), Equals(Y, Z)),
)


def test_database_instance_rejects_variables():
    with pytest.raises(SchemaError, match="not ground"):
        DatabaseInstance.from_atoms([Atom("p", (X,))])


def test_database_instance_rejects_arity_clash():
    with pytest.raises(SchemaError, match="arity"):
        DatabaseInstance.from_atoms([Atom("p", (Constant("a"),)), Atom("p", (Constant("a"), Constant("b")))])


def test_database_instance_rejects_negative_timestamp():
    fact = Atom("p", (Constant("a"),))
    with pytest.raises(SchemaError, match="Negative"):
        DatabaseInstance(frozenset({fact}), "s", {fact: -1})


def test_unified_database():
    udb = UnifiedDatabase.from_instances([DB1, DB2], [ONE_TEACHER])
    assert len(udb.facts) == 3
    assert udb.schema == {"teaches": 2}
    assert [c.name for c in udb.active_domain] == ["c1", "c2", "n1", "n2", "n3"]


def test_compose_meta_program():
    ics = rewrite_fact_level(lloyd_topor(ONE_TEACHER))
    theory = compose([DB1, DB2], ics)
    lines = theory.listing().splitlines()
    assert lines[:3] == ["db(teaches(c1, n1)).", "db(teaches(c2, n2)).", "db(teaches(c2, n3))."]
    assert "fact(X) <- db(X) & ~retract(X)." in lines
    assert "fact(X) <- insert(X)." in lines
    assert "forall X, Y, Z: <- fact(teaches(X, Y)) & fact(teaches(X, Z)) & Y != Z" in lines
    assert len(theory.constraints) == 3
    assert theory.abducibles == frozenset({"insert", "retract"})


def test_compose_with_sources():
    ics = rewrite_fact_level(lloyd_topor(ONE_TEACHER))
    theory = compose_with_sources([DB1, DB2], ics, trust={"db1": 2, "db2": 1})
    lines = theory.listing().splitlines()
    assert "db(teaches(c2, n3), db2)." in lines
    assert "trust(db1, 2)." in lines
    # the base denial, its two trust specializations and the two composer denials
    assert len(theory.constraints) == 5


def test_compose_with_trusted_sources_only():
    ics = rewrite_fact_level(lloyd_topor(ONE_TEACHER))
    theory = compose_with_sources([DB1, DB2], ics, trusted_sources=["db1"])
    lines = theory.listing().splitlines()
    assert "fact(X) <- fact(X, S) & trusted_source(S)." in lines
    trusted = [line for line in lines if line.startswith("trusted_source(")]
    assert trusted == ["trusted_source(db1).", "trusted_source(composer)."]
    assert len(theory.clauses_for("fact")) == 3


def test_compose_with_sources_errors():
    with pytest.raises(SchemaError, match="unknown sources"):
        compose_with_sources([DB1], trust={"nowhere": 1})
    with pytest.raises(SchemaError, match="Unknown trusted sources"):
        compose_with_sources([DB1], trusted_sources=["nowhere"])
    with pytest.raises(SchemaError, match="reserved"):
        compose_with_sources([DatabaseInstance.from_atoms([], "composer")])


def test_trust_denials():
    ics = rewrite_fact_level(lloyd_topor(ONE_TEACHER))
    (denial,) = ics.denials
    specialized = trust_denials(denial)
    assert len(specialized) == 2
    assert all("more_trusted(S0, S)" in str(d) for d in specialized)


def test_compose_with_timestamps():
    fact = teaches("c1", "n1")
    db = DatabaseInstance(frozenset({fact, teaches("c2", "n2")}), "db", {fact: 3})
    theory = compose_with_timestamps([db])
    lines = theory.listing().splitlines()
    assert "add_db(teaches(c1, n1), 3)." in lines
    assert "initially(teaches(c2, n2))." in lines
    assert "time(4)." in lines
    assert "time(5)." not in lines
    assert theory.timestamped


def test_solution_to_repair():
    y = Variable("Y")
    store = EMPTY_STORE.add_disequality((), y, Constant("c1")).add_disequality((), y, Constant("c2"))
    delta = [
        Atom("retract", (atom_to_term(teaches("c2", "n3")),)),
        Atom("insert", (Compound("teaches", (y, Constant("n3"))),)),
    ]
    repair = solution_to_repair(delta, store)
    assert repair.retract == frozenset({teaches("c2", "n3")})
    assert not repair.is_ground
    assert repair.variables() == ("Y",)
    assert str(repair) == "({teaches(_V1, n3)}, {teaches(c2, n3)}) where _V1 != c1, _V1 != c2"


def test_solution_to_repair_rejects_other_atoms():
    with pytest.raises(ValueError, match="neither insert nor retract"):
        solution_to_repair([Atom("db", (Constant("a"),))])


def test_ground_repair():
    y = Variable("Y")
    store = EMPTY_STORE.add_disequality((), y, Constant("c1"))
    repair = solution_to_repair([Atom("insert", (Compound("teaches", (y, Constant("n3"))),))], store)
    grounded = ground_repair(repair, Substitution({"Y": Constant("c3")}))
    assert grounded == Repair(frozenset({teaches("c3", "n3")}))
    with pytest.raises(SubstitutionError, match="violates"):
        ground_repair(repair, Substitution({"Y": Constant("c1")}))
    with pytest.raises(SubstitutionError, match="leaves variables"):
        ground_repair(repair, Substitution())


def test_canonical_key_ignores_variable_names():
    first = Repair(frozenset({Atom("p", (Variable("A"),))}))
    second = Repair(frozenset({Atom("p", (Variable("B"),))}))
    assert first.key() == second.key()
    assert first.canonical() == second.canonical()


def test_apply_repair():
    udb = UnifiedDatabase.from_instances([DB1, DB2], [ONE_TEACHER])
    repaired = apply_repair(udb, Repair(retract=frozenset({teaches("c2", "n3")})))
    assert repaired.facts == frozenset({teaches("c1", "n1"), teaches("c2", "n2")})
    assert repaired.constraints == (ONE_TEACHER,)
