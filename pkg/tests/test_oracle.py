import itertools

import pytest

from repairdb.composer.database import UnifiedDatabase
from repairdb.config import PreferenceCriterion
from repairdb.exceptions import OracleError
from repairdb.logic.terms import Atom, Constant, Variable
from repairdb.oracle import (
    AtomUniverse,
    ModelOracle,
    TruthValue,
    Valuation,
    all_repairs_oracle,
    direct_repairs,
    dist,
    eval3,
    herbrand_min_model,
    join,
    k_leq,
    knowledge_join,
    maximally_consistent,
    mdb_elements,
    mdb_generators,
    mdb_min_elements,
    preferred_repairs_oracle,
    repair_from_join,
    repair_from_model,
    t_leq,
    two_valued_models,
)
from repairdb.transform.formula import And, ForAll, Implies, Not, Or, Pred

__author__ = "gunthergl_r2"
__copyright__ = "gunthergl_r2"
__license__ = "MIT"

T, F, TOP = TruthValue.T, TruthValue.F, TruthValue.TOP
p, q, r = (Atom(name, ()) for name in "pqr")
P, Q, R = Pred(p), Pred(q), Pred(r)

# D = {p, r} with the single constraint p -> q
PROPOSITIONAL = UnifiedDatabase(frozenset({p, r}), (Implies(P, Q),))
PROPOSITIONAL_UNIVERSE = AtomUniverse.from_schema({"p": 0, "q": 0, "r": 0}, ())

X = Variable("X")
a, b, c = Constant("a"), Constant("b"), Constant("c")


def unary(name: str, arg: Constant) -> Atom:
    return Atom(name, (arg,))


# every p is a q, over the constants a, b and c
INCLUSION_DEPENDENCY = UnifiedDatabase(
    frozenset({unary("p", a), unary("p", b), unary("q", a), unary("q", c)}),
    (ForAll(("X",), Implies(Pred(Atom("p", (X,))), Pred(Atom("q", (X,))))),),
)


def valuation(**values: TruthValue) -> Valuation:
    return Valuation({Atom(name, ()): value for name, value in values.items()})


# ------------------------------ Truth values ---------------------------------


def test_truth_connectives():
    assert ~T is F and ~F is T and ~TOP is TOP
    assert (T & TOP) is TOP and (F & TOP) is F
    assert (T | TOP) is T and (F | TOP) is TOP
    assert t_leq(F, TOP) and t_leq(TOP, T) and not t_leq(T, TOP)
    assert TOP.designated and T.designated and not F.designated


def test_knowledge_order():
    assert join(T, T) is T
    assert join(T, F) is TOP
    assert join(F, TOP) is TOP
    assert k_leq(T, TOP) and k_leq(F, TOP) and k_leq(T, T)
    assert not k_leq(T, F) and not k_leq(TOP, T)


def test_eval3_is_knowledge_monotone():
    formulas = [Implies(P, Q), Or((Not(P), R)), Implies(And((P, Q)), R), Not(And((P, Not(Q))))]
    valuations = [
        Valuation(dict(zip((p, q, r), values))) for values in itertools.product((F, TOP, T), repeat=3)
    ]
    for lower, upper in itertools.product(valuations, repeat=2):
        if not lower.k_leq(upper):
            continue
        for formula in formulas:
            assert k_leq(eval3(lower, formula, ()), eval3(upper, formula, ())), (
                f"{formula} is not monotone from {lower} to {upper}"
            )


# ------------------------------ Valuations -----------------------------------


def test_herbrand_min_model():
    assert str(herbrand_min_model(PROPOSITIONAL.facts, PROPOSITIONAL_UNIVERSE)) == "{p:t, q:f, r:t}"
    universe = AtomUniverse.for_database(INCLUSION_DEPENDENCY)
    expected = "{p(a):t, p(b):t, p(c):f, q(a):t, q(b):f, q(c):t}"
    assert str(herbrand_min_model(INCLUSION_DEPENDENCY.facts, universe)) == expected


def test_herbrand_min_model_rejects_foreign_facts():
    with pytest.raises(OracleError, match="outside the atom universe"):
        herbrand_min_model([Atom("s", ())], PROPOSITIONAL_UNIVERSE)


def test_knowledge_join():
    hd = valuation(p=T, q=F, r=T)
    assert knowledge_join(hd, valuation(p=T, q=T, r=T)) == valuation(p=T, q=TOP, r=T)
    with pytest.raises(ValueError, match="same universe"):
        knowledge_join(hd, valuation(p=T))


def test_two_valued_models():
    models = list(two_valued_models(PROPOSITIONAL.constraints, PROPOSITIONAL_UNIVERSE))
    assert len(models) == 6
    assert all(m.is_two_valued for m in models)
    assert valuation(p=T, q=F, r=F) not in models


def test_fresh_constant_extends_universe():
    universe = AtomUniverse.for_database(INCLUSION_DEPENDENCY, fresh_constant=True)
    assert [c.name for c in universe.domain] == ["a", "b", "c", "fresh"]
    assert len(universe) == 8


# -------------------------------- Repairs ------------------------------------


def test_repair_from_model():
    assert str(repair_from_model(valuation(p=T, q=T, r=T), PROPOSITIONAL.facts)) == "({q}, {})"
    assert str(repair_from_model(valuation(p=F, q=F, r=F), PROPOSITIONAL.facts)) == "({}, {p, r})"
    with pytest.raises(ValueError, match="two-valued"):
        repair_from_model(valuation(p=TOP, q=T, r=T), PROPOSITIONAL.facts)


def test_repair_from_join():
    assert str(repair_from_join(valuation(p=TOP, q=F, r=T), PROPOSITIONAL.facts)) == "({}, {p})"


def test_dist():
    assert dist({p, q}, {q, r}) == frozenset({p, r})


def test_generators_and_minimal_elements():
    generators = {str(v) for v in mdb_generators(PROPOSITIONAL, PROPOSITIONAL_UNIVERSE)}
    assert generators == {
        "{p:t, q:⊤, r:t}",
        "{p:t, q:⊤, r:⊤}",
        "{p:⊤, q:⊤, r:t}",
        "{p:⊤, q:⊤, r:⊤}",
        "{p:⊤, q:f, r:t}",
        "{p:⊤, q:f, r:⊤}",
    }
    assert [str(v) for v in mdb_min_elements(PROPOSITIONAL)] == ["{p:t, q:⊤, r:t}", "{p:⊤, q:f, r:t}"]


def test_upward_closure_contains_generators():
    elements = mdb_elements(PROPOSITIONAL)
    minimal = mdb_min_elements(PROPOSITIONAL)
    assert set(mdb_generators(PROPOSITIONAL, PROPOSITIONAL_UNIVERSE)) <= set(elements)
    assert all(any(m.k_leq(e) for m in minimal) for e in elements)


def test_all_repairs():
    assert [str(rep) for rep in all_repairs_oracle(PROPOSITIONAL)] == [
        "({}, {p})",
        "({}, {p, r})",
        "({q}, {})",
        "({q}, {p})",
        "({q}, {p, r})",
        "({q}, {r})",
    ]


@pytest.mark.parametrize("criterion", list(PreferenceCriterion))
def test_preferred_repairs_propositional(criterion):
    assert [str(rep) for rep in preferred_repairs_oracle(PROPOSITIONAL, criterion)] == ["({}, {p})", "({q}, {})"]


def test_maximally_consistent():
    minimal = mdb_min_elements(PROPOSITIONAL)
    extra = valuation(p=TOP, q=TOP, r=T)
    assert maximally_consistent([*minimal, extra], PreferenceCriterion.INCLUSION) == minimal


def test_preferred_repairs_first_order():
    found = [str(rep) for rep in preferred_repairs_oracle(INCLUSION_DEPENDENCY)]
    assert found == ["({}, {p(b)})", "({q(b)}, {})"]


def test_only_join_form_models_give_repairs():
    # {p:⊤, q:t} is a three-valued model of p and p -> q over no facts, but ({p}, {}) does not repair
    db = UnifiedDatabase(frozenset(), (P, Implies(P, Q)))
    assert [str(rep) for rep in direct_repairs(db)] == ["({p, q}, {})"]
    assert [str(rep) for rep in preferred_repairs_oracle(db)] == ["({p, q}, {})"]


# --------------------------------- Oracle ------------------------------------


def test_model_oracle(caplog):
    oracle = ModelOracle(PROPOSITIONAL, verbose=True)
    with pytest.raises(RuntimeError, match="compute"):
        oracle.repairs
    with caplog.at_level("INFO"):
        oracle.compute()
    assert "oracle: 3 atoms, 6 models" in caplog.text
    assert len(oracle.models) == 6
    assert [str(rep) for rep in oracle.repairs] == ["({}, {p})", "({q}, {})"]
    assert oracle.all_repairs == all_repairs_oracle(PROPOSITIONAL)
    frame = oracle.models_df
    assert list(frame.columns) == ["p", "q", "r"]
    assert frame.shape == (2, 3)
    assert oracle.time_calculation >= 0


def test_model_oracle_cap():
    with pytest.raises(OracleError, match="cap is 2"):
        ModelOracle(PROPOSITIONAL, cap=2)
    with pytest.raises(ValueError, match="non-negative"):
        ModelOracle(PROPOSITIONAL, cap=-1)
