"""Depth-first abductive derivations with deterministic-first goal selection."""

from __future__ import annotations

import functools
import itertools
import logging
import threading
from collections.abc import Callable, Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from repairdb.composer.compose import AbductiveTheory
from repairdb.config import SearchBudget
from repairdb.engine.goals import (
    BudgetExhausted,
    DerivationOutcome,
    Failure,
    Floundered,
    FreshNames,
    PositiveGoal,
    Solution,
    State,
    Store,
    normalize_goal,
    rename_universals,
)
from repairdb.engine.rules import Expansion, Rules, check_store_invariants
from repairdb.engine.trace import TraceRecord, TraceRecorder
from repairdb.logic.terms import BodyLiteral, Constant, Denial, Variable
from repairdb.logic.unify import Substitution

logger = logging.getLogger(__name__)

Expand = Callable[[int], Expansion]


class Selector:
    """Chooses which goal of a state is rewritten next."""

    def choose(self, state: State, expand: Expand) -> Expansion:
        raise NotImplementedError

    def order_branches(self, state: State, expansion: Expansion) -> Sequence[int]:
        return range(len(expansion.branches))


class DeterministicFirst(Selector):
    """Prefer goals with at most one branch, then denials with a ground leading literal, then goal order."""

    def choose(self, state: State, expand: Expand) -> Expansion:
        expansions = []
        for index in range(len(state.goals)):
            expansion = expand(index)
            if expansion.deterministic:
                return expansion
            expansions.append(expansion)
        live = [e for e in expansions if not e.floundered]
        for expansion in live:
            if isinstance(state.goals[expansion.goal_index], Denial) and expansion.ground_leading:
                return expansion
        return live[0] if live else expansions[0]


class Leftmost(Selector):
    """The first goal that does not flounder."""

    def choose(self, state: State, expand: Expand) -> Expansion:
        first = None
        for index in range(len(state.goals)):
            expansion = expand(index)
            if not expansion.floundered:
                return expansion
            first = first or expansion
        return first


select_leftmost = Leftmost()
deterministic_first = DeterministicFirst()


class ReplaySelector(Selector):
    """Follows a recorded path: the goal and branch of record ``i`` are taken at depth ``i``.

    Beyond the recorded path it falls back to ``fallback``.
    """

    def __init__(self, records: Iterable[TraceRecord], fallback: Selector = deterministic_first):
        self.records = list(records)
        self.fallback = fallback

    def choose(self, state: State, expand: Expand) -> Expansion:
        if state.depth >= len(self.records):
            return self.fallback.choose(state, expand)
        record = self.records[state.depth]
        if record.goal >= len(state.goals):
            raise ValueError(f"Replay step {record.step} selects goal {record.goal} of {len(state.goals)}.")
        expansion = expand(record.goal)
        if expansion.rule != record.rule:
            raise ValueError(f"Replay expected rule {record.rule} at step {record.step}, got {expansion.rule}.")
        return expansion

    def order_branches(self, state: State, expansion: Expansion) -> Sequence[int]:
        if state.depth >= len(self.records):
            return self.fallback.order_branches(state, expansion)
        branch = self.records[state.depth].branch
        return [branch] if branch < len(expansion.branches) else []


class StepCounter:
    """Rule applications left; shared by the workers of one search."""

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0
        self._lock = threading.Lock()

    def take(self) -> bool:
        with self._lock:
            if self.used >= self.limit:
                return False
            self.used += 1
            return True


class Derivation:
    """Search tree exploration for one query.

    Args:
        theory (AbductiveTheory): The abductive theory.
        budget (SearchBudget, optional): Step and Δ-size limits.
        selector (Selector, optional): Goal selection; deterministic-first by default.
        reuse_first (bool): Order of A.1's branches.
        prune (Callable[[Store], bool], optional): Branches whose store it
            accepts are cut (branch and bound).
        on_solution (Callable[[Solution], None], optional): Called for every
            solution as soon as it is found, from the exploring thread.
        recorder (TraceRecorder, optional): Receives the path of the first solution.
        check_invariants (bool): Assert the store invariants on every solution.
    """

    def __init__(
        self,
        theory: AbductiveTheory,
        budget: SearchBudget | None = None,
        selector: Selector | None = None,
        reuse_first: bool = True,
        prune: Callable[[Store], bool] | None = None,
        on_solution: Callable[[Solution], None] | None = None,
        recorder: TraceRecorder | None = None,
        check_invariants: bool = False,
    ):
        self.theory = theory
        self.budget = budget or SearchBudget()
        self.selector = selector or deterministic_first
        self.names = FreshNames()
        self.rules = Rules(theory, self.names, reuse_first)
        self.prune = prune
        self.on_solution = on_solution
        self.recorder = recorder
        self.check_invariants = check_invariants
        self.steps = StepCounter(self.budget.max_steps)
        self.exhausted_steps = False
        self.truncated_delta = False
        self.n_solutions = 0
        self.n_floundered = 0
        self.n_pruned = 0
        self._counts_lock = threading.Lock()

    def initial_state(self, query: Iterable[BodyLiteral] | PositiveGoal = ()) -> State:
        """``G0 = {query} ∪ IC`` with an empty store."""
        goal = query if isinstance(query, PositiveGoal) else PositiveGoal(tuple(query))
        constraints = tuple(rename_universals(d, self.names) for d in self.theory.constraints)
        goals = ((goal,) if not goal.is_true else ()) + constraints
        return State(goals, Store())

    def _count(self, counter: str) -> None:
        with self._counts_lock:
            setattr(self, counter, getattr(self, counter) + 1)

    def visit(self, state: State) -> tuple[list[DerivationOutcome], list[State]]:
        """Outcomes found at ``state`` and its children in exploration order."""
        if self.prune is not None and self.prune(state.store):
            self._count("n_pruned")
            return [], []
        if state.is_solution:
            if self.check_invariants:
                check_store_invariants(state.store)
            if self.recorder is not None:
                self.recorder.offer_path(state.path)
            solution = Solution(state.store, state.path)
            self._count("n_solutions")
            if self.on_solution is not None:
                self.on_solution(solution)
            return [solution], []
        if not self.steps.take():
            self.exhausted_steps = True
            return [], []

        expansion = self.selector.choose(state, functools.cache(functools.partial(self.rules.expand, state)))
        if expansion.floundered:
            self._count("n_floundered")
            goal = normalize_goal(state.goals[expansion.goal_index], state.store.equalities.solved)
            logger.debug("floundered on %s", goal)
            return [Floundered(goal)], []

        children = []
        for branch in self.selector.order_branches(state, expansion):
            child = expansion.branches[branch]
            if len(child.store.delta) > self.budget.max_delta:
                self.truncated_delta = True
                continue
            record = TraceRecord(state.depth + 1, expansion.rule, expansion.goal_index, branch)
            children.append(replace(child, depth=state.depth + 1, path=state.path + (record,)))
        return [], children

    def explore(self, root: State) -> Iterator[DerivationOutcome]:
        """Depth-first search below ``root``; yields solutions and floundered goals."""
        stack = [root]
        while stack and not self.exhausted_steps:
            outcomes, children = self.visit(stack.pop())
            yield from outcomes
            stack.extend(reversed(children))

    def closing_outcomes(self) -> list[DerivationOutcome]:
        if self.exhausted_steps or self.truncated_delta:
            reason = "max_steps" if self.exhausted_steps else "max_delta"
            return [BudgetExhausted(self.steps.used, reason)]
        if self.n_solutions == 0 and self.n_floundered == 0:
            return [Failure()]
        return []

    def run(self, query: Iterable[BodyLiteral] | PositiveGoal = ()) -> Iterator[DerivationOutcome]:
        yield from self.explore(self.initial_state(query))
        yield from self.closing_outcomes()
        logger.debug(
            "derivation finished: %d steps, %d solutions, %d floundered, %d pruned",
            self.steps.used,
            self.n_solutions,
            self.n_floundered,
            self.n_pruned,
        )

    def run_parallel(
        self, query: Iterable[BodyLiteral] | PositiveGoal = (), workers: int = 2
    ) -> list[DerivationOutcome]:
        """Explore the OR-subtrees below the root concurrently.

        The root is expanded breadth-first until there are at least
        ``workers`` open subtrees; each subtree is then searched depth-first
        by a thread pool. Outcomes are returned in subtree order.
        """
        outcomes: list[DerivationOutcome] = []
        frontier = [self.initial_state(query)]
        while frontier and len(frontier) < workers and not self.exhausted_steps:
            found, children = self.visit(frontier.pop(0))
            outcomes += found
            frontier += children
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for found in pool.map(lambda root: list(self.explore(root)), frontier):
                outcomes += found
        return outcomes + self.closing_outcomes()


def derive(
    theory: AbductiveTheory,
    query: Iterable[BodyLiteral] | PositiveGoal = (),
    budget: SearchBudget | None = None,
    selector: Selector | None = None,
    reuse_first: bool = True,
    recorder: TraceRecorder | None = None,
    check_invariants: bool = False,
) -> Iterator[DerivationOutcome]:
    """Stream the outcomes of the derivation for ``query``.

    Every solution reachable within ``budget`` is emitted. Floundered branches
    emit :class:`Floundered` and are abandoned. The stream ends with
    :class:`BudgetExhausted` when a limit cut the search, or with
    :class:`Failure` when nothing at all was found.
    """
    derivation = Derivation(
        theory, budget, selector, reuse_first, recorder=recorder, check_invariants=check_invariants
    )
    return derivation.run(query)


def select_goal(state: State, theory: AbductiveTheory, selector: Selector | None = None) -> Expansion:
    """The rule application the selector picks for ``state``."""
    rules = Rules(theory, FreshNames())
    return (selector or deterministic_first).choose(state, functools.cache(functools.partial(rules.expand, state)))


def fresh_constant(domain: Iterable[Constant], base: str = "fresh") -> Constant:
    taken = {c.name for c in domain}
    for suffix in itertools.count():
        name = base if suffix == 0 else f"{base}{suffix}"
        if name not in taken:
            return Constant(name)
    raise AssertionError("unreachable")


def answer_substitutions(
    solution: Solution, domain: Iterable[Constant], include_fresh: bool = True
) -> Iterator[Substitution]:
    """Groundings of Δ's free variables over ``domain`` (plus one fresh constant) that satisfy E."""
    domain = sorted(set(domain), key=lambda c: c.name)
    values = domain + ([fresh_constant(domain)] if include_fresh else [])
    names: dict[str, None] = {}
    for atom in solution.delta:
        for name in atom.variables():
            names.setdefault(name, None)
    for choice in itertools.product(values, repeat=len(names)):
        pairs = [(Variable(n), c) for n, c in zip(names, choice)]
        if solution.equalities.add_equalities(pairs) is not None:
            yield Substitution(dict(zip(names, choice)))
