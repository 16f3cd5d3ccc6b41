"""Brute-force repairs from two-valued and three-valued models.

Two independent routes lead to the preferred repairs:

* through the models: every two-valued model ``M`` of the constraints gives
  the three-valued valuation ``H ⊕ M`` (``H`` the minimal model of the
  facts); the atoms it makes ``⊤`` are exactly the facts a repair touches,
  and the most consistent such valuations give the preferred repairs;
* directly: every pair (Insert, Retract) over the atom universe is checked
  for consistency, and the preferred ones are filtered by the criterion.

``ModelOracle`` computes both and raises when they disagree.
"""

from __future__ import annotations

import itertools
import logging
import time
from collections.abc import Iterable, Iterator

import pandas as pd

from repairdb.composer.database import UnifiedDatabase
from repairdb.composer.repair import Repair
from repairdb.config import PreferenceCriterion
from repairdb.exceptions import OracleError
from repairdb.logic.terms import Atom
from repairdb.optimizer.criteria import preferred_subset
from repairdb.oracle.truth import TruthValue
from repairdb.oracle.valuation import (
    DEFAULT_CAP,
    AtomUniverse,
    Valuation,
    herbrand_min_model,
    knowledge_join,
    models_frame,
    satisfies,
    two_valued_models,
)

logger = logging.getLogger(__name__)


def dist(d1: Iterable[Atom], d2: Iterable[Atom]) -> frozenset[Atom]:
    """Symmetric difference of two fact sets."""
    return frozenset(d1) ^ frozenset(d2)


def repair_from_model(m: Valuation, facts: Iterable[Atom]) -> Repair:
    """``(M^t \\ D, D \\ M^t)`` for a two-valued model ``M``."""
    if not m.is_two_valued:
        raise ValueError("repair_from_model needs a two-valued valuation.")
    facts = frozenset(facts)
    true = m.true_atoms
    return Repair(true - facts, facts - true)


def repair_from_join(n: Valuation, facts: Iterable[Atom]) -> Repair:
    """``(N^⊤ \\ D, N^⊤ ∩ D)`` for a valuation of the form ``H ⊕ M``."""
    facts = frozenset(facts)
    top = n.top_atoms
    return Repair(top - facts, top & facts)


def _unique(repairs: Iterable[Repair]) -> list[Repair]:
    return sorted({r.key(): r for r in repairs}.values(), key=Repair.key)


def _universe(db: UnifiedDatabase, fresh_constant: bool, cap: int) -> AtomUniverse:
    universe = AtomUniverse.for_database(db, fresh_constant)
    universe.check_cap(cap)
    return universe


def mdb_generators(db: UnifiedDatabase, universe: AtomUniverse, cap: int = DEFAULT_CAP) -> list[Valuation]:
    """``H ⊕ M`` for every two-valued model ``M`` of the constraints, deduplicated."""
    hd = herbrand_min_model(db.facts, universe)
    found = {knowledge_join(hd, m) for m in two_valued_models(db.constraints, universe, cap)}
    return sorted(found, key=Valuation.key)


def _k_minimal(valuations: list[Valuation]) -> list[Valuation]:
    return [v for v in valuations if not any(u != v and u.k_leq(v) for u in valuations)]


def mdb_min_elements(
    db: UnifiedDatabase, fresh_constant: bool = False, cap: int = DEFAULT_CAP
) -> list[Valuation]:
    """The knowledge-minimal three-valued models of ``db``, in canonical order."""
    return _k_minimal(mdb_generators(db, _universe(db, fresh_constant, cap), cap))


def mdb_elements(db: UnifiedDatabase, cap: int = DEFAULT_CAP) -> list[Valuation]:
    """Every valuation knowledge-above some generator.

    This is the upward-closed model set the generators stand for; it grows
    as ``3^n`` and is meant for checking the generator reduction on tiny
    universes.
    """
    universe = _universe(db, False, cap)
    closure: set[Valuation] = set()
    for generator in mdb_generators(db, universe, cap):
        lower = [a for a in universe if generator[a] is not TruthValue.TOP]
        for raised in itertools.chain.from_iterable(
            itertools.combinations(lower, k) for k in range(len(lower) + 1)
        ):
            closure.add(Valuation({**generator, **dict.fromkeys(raised, TruthValue.TOP)}))
    return sorted(closure, key=Valuation.key)


def more_consistent(n1: Valuation, n2: Valuation, criterion: PreferenceCriterion) -> bool:
    """``n1`` has strictly fewer inconsistent atoms than ``n2``."""
    if criterion is PreferenceCriterion.CARDINALITY:
        return len(n1.top_atoms) < len(n2.top_atoms)
    return n1.top_atoms < n2.top_atoms


def maximally_consistent(valuations: Iterable[Valuation], criterion: PreferenceCriterion) -> list[Valuation]:
    valuations = list(valuations)
    return [n for n in valuations if not any(more_consistent(o, n, criterion) for o in valuations)]


def all_repairs_oracle(
    db: UnifiedDatabase, fresh_constant: bool = False, cap: int = DEFAULT_CAP
) -> list[Repair]:
    """Every repair of ``db``, one per two-valued model of its constraints."""
    universe = _universe(db, fresh_constant, cap)
    return _unique(repair_from_model(m, db.facts) for m in two_valued_models(db.constraints, universe, cap))


def _subsets(atoms: Iterable[Atom]) -> Iterator[frozenset[Atom]]:
    atoms = sorted(atoms, key=str)
    for k in range(len(atoms) + 1):
        for combination in itertools.combinations(atoms, k):
            yield frozenset(combination)


def direct_repairs(db: UnifiedDatabase, fresh_constant: bool = False, cap: int = DEFAULT_CAP) -> list[Repair]:
    """Every (Insert, Retract) with Insert outside and Retract inside the facts that restores consistency."""
    universe = _universe(db, fresh_constant, cap)
    facts = db.facts
    outside = [a for a in universe if a not in facts]
    found = []
    for insert in _subsets(outside):
        for retract in _subsets(facts):
            repaired = herbrand_min_model((facts | insert) - retract, universe)
            if satisfies(repaired, db.constraints, universe.domain):
                found.append(Repair(insert, retract))
    return sorted(found, key=Repair.key)


def preferred_repairs_oracle(
    db: UnifiedDatabase,
    criterion: PreferenceCriterion = PreferenceCriterion.INCLUSION,
    fresh_constant: bool = False,
    cap: int = DEFAULT_CAP,
) -> list[Repair]:
    """The preferred repairs of ``db``, computed by both routes.

    Raises:
        OracleError: When the universe exceeds ``cap`` or the routes disagree.
    """
    oracle = ModelOracle(db, criterion, fresh_constant=fresh_constant, cap=cap)
    oracle.compute()
    return oracle.repairs


class ModelOracle:
    """
    Ground-truth repairs of a small database by model enumeration.

    Args:
        db (UnifiedDatabase):
            Facts and constraints.
        criterion (PreferenceCriterion, optional):
            Preference criterion. Defaults to inclusion.
        fresh_constant (bool, optional):
            Extend the quantifier domain by one constant not in the database.
        cap (int, optional):
            Largest atom universe that is enumerated. Defaults to 16.
        cross_check (bool, optional):
            Also enumerate (Insert, Retract) pairs directly and compare.
            Defaults to True.
        verbose (bool, optional):
            If True, logs at INFO level instead of DEBUG.
    """

    def __init__(
        self,
        db: UnifiedDatabase,
        criterion: PreferenceCriterion = PreferenceCriterion.INCLUSION,
        fresh_constant: bool = False,
        cap: int = DEFAULT_CAP,
        cross_check: bool = True,
        verbose: bool = False,
    ) -> None:
        if cap < 0:
            raise ValueError("cap must be non-negative.")
        self.db = db
        self.criterion = PreferenceCriterion(criterion)
        self.fresh_constant = fresh_constant
        self.cap = cap
        self.cross_check = cross_check
        self.verbose = verbose
        self.universe = _universe(db, fresh_constant, cap)

        self._models: list[Valuation] = []
        self._generators: list[Valuation] = []
        self._repairs: list[Repair] = []
        self._time_sec: float = 0.0
        self._computed = False

    def _require_computed(self) -> None:
        if not self._computed:
            raise RuntimeError("Call compute() first.")

    @property
    def models(self) -> list[Valuation]:
        """Two-valued models of the constraints."""
        self._require_computed()
        return self._models

    @property
    def min_elements(self) -> list[Valuation]:
        self._require_computed()
        return _k_minimal(self._generators)

    @property
    def repairs(self) -> list[Repair]:
        """Preferred repairs in canonical order."""
        self._require_computed()
        return self._repairs

    @property
    def all_repairs(self) -> list[Repair]:
        self._require_computed()
        return _unique(repair_from_model(m, self.db.facts) for m in self._models)

    @property
    def models_df(self) -> pd.DataFrame:
        """The knowledge-minimal three-valued models, one column per atom."""
        return models_frame(self.min_elements, self.universe)

    @property
    def time_calculation(self) -> float:
        return self._time_sec

    def compute(self) -> None:
        level = logging.INFO if self.verbose else logging.DEBUG
        t0 = time.perf_counter()
        hd = herbrand_min_model(self.db.facts, self.universe)
        self._models = list(two_valued_models(self.db.constraints, self.universe, self.cap))
        self._generators = sorted({knowledge_join(hd, m) for m in self._models}, key=Valuation.key)
        best = maximally_consistent(_k_minimal(self._generators), self.criterion)
        by_models = _unique(repair_from_join(n, self.db.facts) for n in best)
        if self.cross_check:
            direct = preferred_subset(direct_repairs(self.db, self.fresh_constant, self.cap), self.criterion)
            if [r.key() for r in direct] != [r.key() for r in by_models]:
                raise OracleError(
                    "Model route and direct route disagree: "
                    f"{[str(r) for r in by_models]} vs {[str(r) for r in direct]}."
                )
        self._repairs = by_models
        self._time_sec = time.perf_counter() - t0
        self._computed = True
        logger.log(
            level,
            "oracle: %d atoms, %d models, %d preferred repairs in %.3fs",
            len(self.universe),
            len(self._models),
            len(self._repairs),
            self._time_sec,
        )
