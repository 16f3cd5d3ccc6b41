"""From a parsed problem to its preferred repairs.

``run`` goes through the abductive engine, ``run_oracle`` through model
enumeration, and ``check`` runs both and compares.
"""

from __future__ import annotations

import itertools
import logging
import time
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from repairdb.composer.compose import AbductiveTheory, compose, compose_with_sources, compose_with_timestamps
from repairdb.composer.repair import Repair, ground_repair
from repairdb.config import RunOptions
from repairdb.engine.derive import Selector, fresh_constant
from repairdb.engine.trace import TraceRecorder
from repairdb.exceptions import FlounderingError, OracleError, SubstitutionError
from repairdb.io.parser import ProblemFile
from repairdb.logic.terms import Atom, Clause, Constant, Literal
from repairdb.logic.unify import Substitution
from repairdb.optimizer.criteria import preferred_subset
from repairdb.optimizer.search import RepairSearch
from repairdb.oracle.repairs import ModelOracle
from repairdb.report import RepairReport, SearchStats
from repairdb.transform.formula import universal_closure
from repairdb.transform.lloyd_topor import DenialTheory, guard_unsafe, lloyd_topor_all, rewrite_fact_level

logger = logging.getLogger(__name__)

DOMAIN_PREDICATE = "dom"


def _domain_predicate(taken: Iterable[str]) -> str:
    taken = set(taken)
    name, suffix = DOMAIN_PREDICATE, 0
    while name in taken:
        suffix += 1
        name = f"{DOMAIN_PREDICATE}_{suffix}"
    return name


def prepare_constraints(problem: ProblemFile) -> DenialTheory:
    """Guard, transform and lift the problem's constraints to ``fact/1`` level.

    Variables that would otherwise only occur negated are bound by a domain
    predicate whose facts are the active domain.
    """
    db = problem.unified()
    dom = _domain_predicate(db.schema)
    guarded = [guard_unsafe(universal_closure(ic), dom) for ic in problem.constraints]
    theory = rewrite_fact_level(lloyd_topor_all(guarded), keep=(dom,))
    bodies = [*theory.denials, *theory.auxiliary_clauses]
    if not any(isinstance(lit, Literal) and lit.atom.predicate == dom for item in bodies for lit in item.body):
        return theory
    domain = tuple(Clause(Atom(dom, (c,))) for c in db.active_domain)
    fresh = theory.fresh_predicates if domain else theory.fresh_predicates | {dom}
    return DenialTheory(theory.denials, domain + theory.auxiliary_clauses, fresh, dict(theory.aliases))


def build_theory(problem: ProblemFile, options: RunOptions) -> AbductiveTheory:
    """The composed abductive theory for the composer the options select."""
    if options.sources and options.timestamps:
        raise ValueError("sources and timestamps cannot be combined.")
    ics = prepare_constraints(problem)
    databases = problem.databases()
    if options.timestamps:
        return compose_with_timestamps(databases, ics)
    if options.sources or options.only_sources is not None:
        return compose_with_sources(databases, ics, problem.trust or None, options.only_sources)
    return compose(databases, ics)


def repair_groundings(
    repair: Repair, domain: Iterable[Constant], include_fresh: bool = True
) -> Iterator[Substitution]:
    """Groundings over ``domain`` (plus one fresh constant) that the residual constraints allow."""
    values = sorted(set(domain), key=lambda c: c.name)
    if include_fresh:
        values.append(fresh_constant(values))
    names = repair.variables()
    for choice in itertools.product(values, repeat=len(names)):
        grounding = Substitution(dict(zip(names, choice)))
        try:
            ground_repair(repair, grounding)
        except SubstitutionError:
            continue
        yield grounding


@dataclass(frozen=True)
class EngineRun:
    search: RepairSearch
    report: RepairReport
    repairs: tuple[Repair, ...]


def _run(
    problem: ProblemFile,
    options: RunOptions,
    recorder: TraceRecorder | None = None,
    verbose: bool = False,
    strict: bool = False,
    selector: Selector | None = None,
) -> EngineRun:
    theory = build_theory(problem, options)
    search = RepairSearch(
        theory,
        options.criterion,
        options.budget,
        reuse_first=options.reuse_first,
        workers=options.workers,
        pruning=not options.all_repairs,
        selector=selector,
        recorder=recorder,
        verbose=verbose,
    )
    search.compute()
    result = search.result()
    if strict and result.floundered:
        raise FlounderingError(result.floundered[0])
    repairs = tuple(search.all_repairs if options.all_repairs else search.repairs)
    groundings = None
    if options.ground:
        domain = problem.unified().active_domain
        groundings = {r.key(): list(repair_groundings(r, domain)) for r in repairs if not r.is_ground}
    row = search.stats_df.iloc[0]
    stats = SearchStats(
        steps=int(row["steps"]),
        solutions=int(row["solutions"]),
        pruned=int(row["pruned"]),
        floundered=int(row["floundered"]),
    )
    report = RepairReport.from_repairs(repairs, result.status, stats, result.floundered, groundings)
    return EngineRun(search, report, repairs)


def run(
    problem: ProblemFile,
    options: RunOptions | None = None,
    recorder: TraceRecorder | None = None,
    verbose: bool = False,
    strict: bool = False,
    selector: Selector | None = None,
) -> RepairReport:
    """Preferred repairs of ``problem`` computed by abduction.

    Args:
        problem (ProblemFile): The parsed problem.
        options (RunOptions, optional): Defaults to the problem's own ``option`` lines.
        recorder (TraceRecorder, optional): Receives the replay log.
        verbose (bool, optional): Log progress at INFO level.
        strict (bool, optional): Raise instead of reporting a floundered search.
        selector (Selector, optional): Goal selection strategy, for instance a replay of a trace.

    Raises:
        FlounderingError: In strict mode, when a branch floundered.
    """
    options = options or problem.run_options()
    t0 = time.perf_counter()
    report = _run(problem, options, recorder, verbose, strict, selector).report
    logger.log(
        logging.INFO if verbose else logging.DEBUG,
        "run: %d repairs, status %s, %.3fs",
        len(report.repairs),
        report.status,
        time.perf_counter() - t0,
    )
    return report


def _oracle(problem: ProblemFile, options: RunOptions, verbose: bool = False) -> ModelOracle:
    if options.sources or options.timestamps or options.only_sources is not None:
        raise OracleError("The model oracle handles the plain composer only.")
    oracle = ModelOracle(
        problem.unified(),
        options.criterion,
        fresh_constant=options.oracle_fresh_constant,
        cap=options.oracle_cap,
        verbose=verbose,
    )
    oracle.compute()
    return oracle


def run_oracle(problem: ProblemFile, options: RunOptions | None = None, verbose: bool = False) -> RepairReport:
    """Preferred (or, with ``all_repairs``, all) repairs by model enumeration.

    Raises:
        OracleError: When the atom universe exceeds ``options.oracle_cap``, or
            for the source and timestamp composers.
    """
    options = options or problem.run_options()
    oracle = _oracle(problem, options, verbose)
    repairs = oracle.all_repairs if options.all_repairs else oracle.repairs
    return RepairReport.from_repairs(repairs, "complete", SearchStats(models=len(oracle.models)))


@dataclass(frozen=True)
class CheckResult:
    engine: RepairReport
    oracle: RepairReport
    missing: tuple[str, ...]
    extra: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra

    def to_text(self) -> str:
        if self.ok:
            return f"engine and oracle agree on {len(self.oracle.repairs)} repairs"
        lines = [f"only the oracle found: {r}" for r in self.missing]
        lines += [f"only the engine found: {r}" for r in self.extra]
        return "\n".join(lines)


def check(problem: ProblemFile, options: RunOptions | None = None, verbose: bool = False) -> CheckResult:
    """Compare the engine's preferred repairs with the oracle's.

    Non-ground engine repairs are replaced by their groundings over the
    oracle's domain before the preferred ones are selected.
    """
    options = (options or problem.run_options()).merged(all_repairs=False)
    engine = _run(problem, options, verbose=verbose)
    oracle = _oracle(problem, options, verbose)
    domain = oracle.universe.domain
    ground: list[Repair] = []
    for repair in engine.repairs:
        if repair.is_ground:
            ground.append(repair)
        else:
            ground += [ground_repair(repair, g) for g in repair_groundings(repair, domain, include_fresh=False)]
    found = {str(r): r for r in preferred_subset(ground, options.criterion)}
    expected = {str(r): r for r in oracle.repairs}
    oracle_report = RepairReport.from_repairs(oracle.repairs, "complete", SearchStats(models=len(oracle.models)))
    return CheckResult(
        engine.report,
        oracle_report,
        tuple(sorted(set(expected) - set(found))),
        tuple(sorted(set(found) - set(expected))),
    )
