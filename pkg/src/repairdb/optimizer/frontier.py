"""The branch-and-bound frontier shared by all branches of one search."""

from __future__ import annotations

import threading

from repairdb.composer.repair import Repair, solution_to_repair
from repairdb.config import PreferenceCriterion
from repairdb.engine.goals import Store
from repairdb.optimizer.criteria import subsumes


def _contains(smaller: Repair, larger: Repair) -> bool:
    return smaller.insert <= larger.insert and smaller.retract <= larger.retract


class Frontier:
    """Best repairs found so far.

    In cardinality mode ``best_bound`` is the smallest repair size seen; it
    never increases. In inclusion mode the kept repairs form an antichain
    under subsumption: no kept repair has an instance contained in every
    instance of another.

    Args:
        criterion (PreferenceCriterion): The preference criterion.
        timestamped (bool): Whether Δ atoms carry a time argument.
    """

    def __init__(self, criterion: PreferenceCriterion, timestamped: bool = False):
        self.criterion = criterion
        self.timestamped = timestamped
        self.best_bound: int | None = None
        self.bound_history: list[int] = []
        self._repairs: dict[tuple, Repair] = {}
        self._lock = threading.Lock()

    @property
    def repairs(self) -> list[Repair]:
        with self._lock:
            return sorted(self._repairs.values(), key=Repair.key)

    def offer(self, repair: Repair) -> bool:
        """Add a repair from a new solution; ``False`` when it is dominated or known."""
        key = repair.key()
        with self._lock:
            if key in self._repairs:
                return False
            if self.criterion is PreferenceCriterion.CARDINALITY:
                accepted = self._offer_cardinality(repair)
            else:
                accepted = self._offer_inclusion(repair)
            if accepted:
                self._repairs[key] = repair
                self._check_antichain()
            return accepted

    def _offer_cardinality(self, repair: Repair) -> bool:
        if self.best_bound is not None and repair.size > self.best_bound:
            return False
        if self.best_bound is None or repair.size < self.best_bound:
            self.best_bound = repair.size
            self.bound_history.append(repair.size)
            self._repairs = {k: r for k, r in self._repairs.items() if r.size <= repair.size}
        return True

    def _offer_inclusion(self, repair: Repair) -> bool:
        if any(subsumes(other, repair) for other in self._repairs.values()):
            return False
        self._repairs = {k: r for k, r in self._repairs.items() if not subsumes(repair, r)}
        return True

    def _check_antichain(self) -> None:
        if self.criterion is not PreferenceCriterion.INCLUSION:
            return
        kept = list(self._repairs.values())
        for a in kept:
            for b in kept:
                assert a is b or not subsumes(a, b), f"{a} dominates {b} in the frontier"

    def prune(self, store: Store) -> bool:
        """Whether no preferred repair can be reached from a state with ``store``."""
        if self.criterion is PreferenceCriterion.CARDINALITY:
            bound = self.best_bound
            return bound is not None and len(store.delta) > bound
        partial = solution_to_repair(store.ground_delta(), timestamped=self.timestamped)
        with self._lock:
            members = [r for r in self._repairs.values() if r.is_ground]
        return any(_contains(m, partial) and m.key() != partial.key() for m in members)
