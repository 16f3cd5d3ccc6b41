import logging
import time
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from repairdb.composer.compose import AbductiveTheory
from repairdb.composer.repair import Repair, solution_to_repair
from repairdb.config import PreferenceCriterion, SearchBudget
from repairdb.engine.derive import Derivation, Selector
from repairdb.engine.goals import BudgetExhausted, Floundered, GoalFormula, Solution
from repairdb.engine.trace import TraceRecorder
from repairdb.logic.terms import BodyLiteral
from repairdb.optimizer.criteria import preferred_subset
from repairdb.optimizer.frontier import Frontier

logger = logging.getLogger(__name__)

PathLike = str | Path

COMPLETE = "complete"
BUDGET_EXHAUSTED = "budget_exhausted"
FLOUNDERED = "floundered"


@dataclass(frozen=True)
class SearchResult:
    """Preferred repairs plus how much they can be trusted.

    With ``status`` other than ``complete`` the repairs are the best found,
    not necessarily all preferred repairs.
    """

    repairs: tuple[Repair, ...]
    status: str
    floundered: tuple[GoalFormula, ...] = ()
    solutions: tuple[Solution, ...] = ()

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE


class RepairSearch:
    """
    Compute the preferred repairs of an abductive theory by branch and bound.

    Args:
        theory (AbductiveTheory):
            The composed meta-theory.
        criterion (PreferenceCriterion, optional):
            Inclusion or cardinality. Defaults to inclusion.
        budget (SearchBudget | None, optional):
            Step and Δ-size limits. Defaults to ``SearchBudget()``.
        query (Iterable[BodyLiteral], optional):
            Query conjunction; repairs need the empty query ``true``.
        reuse_first (bool, optional):
            Order of the reuse and fresh branches of abduction.
        workers (int, optional):
            Threads exploring OR-subtrees. Defaults to 1 (sequential).
        pruning (bool, optional):
            If False, every solution is collected and filtered at the end.
        selector (Selector | None, optional):
            Goal selection strategy.
        recorder (TraceRecorder | None, optional):
            Receives the derivation path of the first solution whose repair
            is among the preferred ones.
        verbose (bool, optional):
            If True, logs progress at INFO level instead of DEBUG.
        intermediate_file (PathLike | None, optional):
            If set, writes a CSV of the current best repairs after each improvement.
        check_invariants (bool, optional):
            Assert the store invariants on every solution.
    """

    def __init__(
        self,
        theory: AbductiveTheory,
        criterion: PreferenceCriterion = PreferenceCriterion.INCLUSION,
        budget: SearchBudget | None = None,
        query: Iterable[BodyLiteral] = (),
        reuse_first: bool = True,
        workers: int = 1,
        pruning: bool = True,
        selector: Selector | None = None,
        recorder: TraceRecorder | None = None,
        verbose: bool = False,
        intermediate_file: PathLike | None = None,
        check_invariants: bool = False,
    ) -> None:
        if workers < 1:
            raise ValueError("workers must be at least 1.")
        self.theory = theory
        self.criterion = PreferenceCriterion(criterion)
        self.budget = budget or SearchBudget()
        self.query = tuple(query)
        self.reuse_first = reuse_first
        self.workers = workers
        self.pruning = pruning
        self.selector = selector
        self.recorder = recorder
        self.verbose = verbose
        self._intermediate_file = intermediate_file
        self.check_invariants = check_invariants

        self.frontier = Frontier(self.criterion, timestamped=theory.timestamped)
        self._solutions: list[Solution] = []
        self._all_repairs: list[Repair] = []
        self._floundered: list[GoalFormula] = []
        self._exhausted: BudgetExhausted | None = None
        self._derivation: Derivation | None = None
        self._time_sec: float = 0.0
        self._computed: bool = False

    def _log(self, message: str, *args) -> None:
        logger.log(logging.INFO if self.verbose else logging.DEBUG, message, *args)

    def _to_repair(self, solution: Solution) -> Repair:
        return solution_to_repair(solution.delta, solution.equalities, self.theory.timestamped)

    def _on_solution(self, solution: Solution) -> None:
        repair = self._to_repair(solution)
        if self.frontier.offer(repair):
            self._log("new candidate repair %s", repair)
            if self._intermediate_file is not None:
                self.save_intermediate(self._intermediate_file)

    # ----------------------------- Public properties ------------------------------

    def _require_computed(self) -> None:
        if not self._computed:
            raise RuntimeError("Call compute() first.")

    @property
    def repairs(self) -> list[Repair]:
        """The preferred repairs in canonical order."""
        self._require_computed()
        if not self.pruning:
            return preferred_subset(self._all_repairs, self.criterion)
        return self.frontier.repairs

    @property
    def all_repairs(self) -> list[Repair]:
        """Repairs of every solution reached (deduplicated), before filtering."""
        self._require_computed()
        return sorted({r.key(): r for r in self._all_repairs}.values(), key=Repair.key)

    @property
    def status(self) -> str:
        self._require_computed()
        if self._floundered:
            return FLOUNDERED
        if self._exhausted is not None:
            return BUDGET_EXHAUSTED
        return COMPLETE

    @property
    def time_calculation(self) -> float:
        """Wall clock seconds spent in compute()."""
        return self._time_sec

    @property
    def stats_df(self) -> pd.DataFrame:
        """One-row table of search statistics."""
        self._require_computed()
        derivation = self._derivation
        return pd.DataFrame(
            [
                {
                    "criterion": self.criterion.value,
                    "steps": derivation.steps.used,
                    "solutions": derivation.n_solutions,
                    "pruned": derivation.n_pruned,
                    "floundered": derivation.n_floundered,
                    "repairs": len(self.repairs),
                    "status": self.status,
                    "seconds": self._time_sec,
                }
            ]
        )

    @property
    def repairs_df(self) -> pd.DataFrame:
        """The current best repairs, one row each."""
        rows = [
            {
                "insert": ", ".join(sorted(map(str, r.canonical().insert))),
                "retract": ", ".join(sorted(map(str, r.canonical().retract))),
                "where": ", ".join(str(d) for d in r.canonical().residual_constraints),
                "size": r.size,
            }
            for r in self.frontier.repairs
        ]
        return pd.DataFrame(rows, columns=["insert", "retract", "where", "size"])

    def result(self) -> SearchResult:
        self._require_computed()
        return SearchResult(tuple(self.repairs), self.status, tuple(self._floundered), tuple(self._solutions))

    # ----------------------------- Persistence -----------------------------------

    def save_intermediate(self, filename: PathLike) -> None:
        """Save the current best repairs to CSV."""
        self.repairs_df.to_csv(Path(filename), index=False)
        self._log("wrote %s", filename)

    # ----------------------------- Core computation ------------------------------

    def _record_trace(self) -> None:
        # the path to a solution whose repair survived the filtering
        kept = {r.key() for r in self.repairs}
        for solution in self._solutions:
            if self._to_repair(solution).key() in kept:
                self.recorder.offer_path(solution.path)
                return

    def compute(self) -> None:
        """Run the derivation and keep the preferred repairs."""
        derivation = Derivation(
            self.theory,
            self.budget,
            self.selector,
            self.reuse_first,
            prune=self.frontier.prune if self.pruning else None,
            on_solution=self._on_solution,
            check_invariants=self.check_invariants,
        )
        self._derivation = derivation
        t0 = time.perf_counter()
        if self.workers > 1:
            outcomes = derivation.run_parallel(self.query, self.workers)
        else:
            outcomes = derivation.run(self.query)
        for outcome in outcomes:
            if isinstance(outcome, Solution):
                self._solutions.append(outcome)
                self._all_repairs.append(self._to_repair(outcome))
            elif isinstance(outcome, Floundered):
                self._floundered.append(outcome.goal)
            elif isinstance(outcome, BudgetExhausted):
                self._exhausted = outcome
        self._time_sec = time.perf_counter() - t0
        self._computed = True
        if self.recorder is not None:
            self._record_trace()
        self._log(
            "search finished in %.3fs: %d steps, %d solutions, %d repairs kept",
            self._time_sec,
            derivation.steps.used,
            len(self._solutions),
            len(self.frontier.repairs),
        )


def preferred_repairs(
    theory: AbductiveTheory,
    criterion: PreferenceCriterion = PreferenceCriterion.INCLUSION,
    budget: SearchBudget | None = None,
    **kwargs,
) -> SearchResult:
    """The preferred repairs of ``theory``; see :class:`RepairSearch` for the keyword arguments."""
    search = RepairSearch(theory, criterion, budget, **kwargs)
    search.compute()
    return search.result()


def prune_cardinality(store, frontier: Frontier) -> bool:
    """Cut a branch whose Δ is already larger than the best repair size."""
    if frontier.criterion is not PreferenceCriterion.CARDINALITY:
        raise ValueError("prune_cardinality needs a cardinality frontier.")
    return frontier.prune(store)


def prune_inclusion(store, frontier: Frontier) -> bool:
    """Cut a branch whose ground Δ strictly contains a known ground repair."""
    if frontier.criterion is not PreferenceCriterion.INCLUSION:
        raise ValueError("prune_inclusion needs an inclusion frontier.")
    return frontier.prune(store)
