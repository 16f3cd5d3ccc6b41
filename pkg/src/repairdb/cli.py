"""The ``repairdb`` command.

Exit codes: 0 complete, 1 ``--check`` found differences, 2 budget
exhausted, 3 floundered, 4 parse or usage error.
"""

from __future__ import annotations

import logging
from pathlib import Path

import click

from repairdb import __version__
from repairdb.config import PreferenceCriterion, RunOptions, SearchBudget
from repairdb.engine.derive import ReplaySelector
from repairdb.engine.trace import TraceRecorder, read_trace
from repairdb.exceptions import RepairError
from repairdb.io.load_facts import load_fact_tables
from repairdb.io.parser import ProblemFile, read_problem
from repairdb.pipeline import check, run, run_oracle
from repairdb.report import RepairReport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BUDGET = 2
EXIT_FLOUNDERED = 3
EXIT_USAGE = 4

STATUS_EXIT_CODES = {
    "complete": EXIT_OK,
    "budget_exhausted": EXIT_BUDGET,
    "floundered": EXIT_FLOUNDERED,
}


class InputError(click.ClickException):
    exit_code = EXIT_USAGE


class _UsageExitCode:
    """Report click's own usage errors with our usage exit code."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise


class RepairCommand(_UsageExitCode, click.Command):
    pass


class RepairGroup(_UsageExitCode, click.Group):
    command_class = RepairCommand


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _load(problem_file: Path, data: Path | None, verbose: bool) -> ProblemFile:
    try:
        problem = read_problem(problem_file)
        if data is not None:
            problem = problem.with_databases(load_fact_tables(data, verbose=verbose))
    except RepairError as e:
        raise InputError(str(e)) from e
    return problem


def _options(problem: ProblemFile, **overrides) -> RunOptions:
    try:
        options = problem.run_options()
    except RepairError as e:
        raise InputError(str(e)) from e
    max_steps = overrides.pop("max_steps", None)
    max_delta = overrides.pop("max_delta", None)
    if max_steps is not None or max_delta is not None:
        budget = options.budget.model_dump()
        budget.update({k: v for k, v in (("max_steps", max_steps), ("max_delta", max_delta)) if v is not None})
        overrides["budget"] = SearchBudget(**budget)
    if overrides.get("criterion") is not None:
        overrides["criterion"] = PreferenceCriterion(overrides["criterion"])
    options = options.merged(**overrides)
    if options.sources and options.timestamps:
        raise InputError("--sources and --timestamps cannot be combined.")
    return options


def _emit(report: RepairReport, output_format: str) -> None:
    click.echo(report.to_json() if output_format == "json" else report.to_text())


criterion_option = click.option(
    "--criterion",
    type=click.Choice([c.value for c in PreferenceCriterion]),
    default=None,
    help="Preference criterion (default: inclusion, or the file's option line).",
)
format_option = click.option(
    "--format", "output_format", type=click.Choice(["json", "text"]), default="json", show_default=True
)
data_option = click.option(
    "--data",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    default=None,
    help="Directory of .csv/.feather fact tables; each directory is a source.",
)
verbose_option = click.option("-v", "--verbose", is_flag=True, help="Log progress at INFO level.")


@click.group(cls=RepairGroup)
@click.version_option(__version__, prog_name="repairdb")
def cli() -> None:
    """Repair integrated databases under integrity constraints."""


@cli.command("run")
@click.argument("problem_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@criterion_option
@click.option("--sources", is_flag=True, help="Use the source-annotated composer with trust levels.")
@click.option("--timestamps", is_flag=True, help="Use the event composer for timestamped facts.")
@format_option
@click.option("--max-steps", type=click.IntRange(min=1), default=None, help="Rule applications per run.")
@click.option("--max-delta", type=click.IntRange(min=1), default=None, help="Abduced atoms per branch.")
@click.option("--trace", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write a replay log.")
@click.option(
    "--replay",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Select goals as recorded in a replay log.",
)
@click.option("--check", "check_", is_flag=True, help="Compare with the model oracle; exit 1 on differences.")
@click.option("--all-repairs", is_flag=True, help="Report every repair found, not only the preferred ones.")
@click.option("--ground", is_flag=True, help="List the groundings of non-ground repairs.")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Threads exploring the search tree.")
@click.option("--only-source", multiple=True, help="Only facts of this source count (repeatable).")
@data_option
@verbose_option
@click.pass_context
def run_command(
    ctx: click.Context,
    problem_file: Path,
    criterion: str | None,
    sources: bool,
    timestamps: bool,
    output_format: str,
    max_steps: int | None,
    max_delta: int | None,
    trace: Path | None,
    replay: Path | None,
    check_: bool,
    all_repairs: bool,
    ground: bool,
    workers: int | None,
    only_source: tuple[str, ...],
    data: Path | None,
    verbose: bool,
) -> None:
    """Compute the preferred repairs of PROBLEM_FILE."""
    _configure_logging(verbose)
    problem = _load(problem_file, data, verbose)
    options = _options(
        problem,
        criterion=criterion,
        sources=sources or None,
        timestamps=timestamps or None,
        max_steps=max_steps,
        max_delta=max_delta,
        workers=workers,
        ground=ground or None,
        all_repairs=all_repairs or None,
        only_sources=only_source or None,
    )
    try:
        if check_:
            result = check(problem, options, verbose=verbose)
            _emit(result.engine, output_format)
            click.echo(result.to_text(), err=True)
            ctx.exit(STATUS_EXIT_CODES[result.engine.status] if result.ok else EXIT_CHECK_FAILED)
        recorder = TraceRecorder() if trace is not None else None
        selector = ReplaySelector(read_trace(replay)) if replay is not None else None
        report = run(problem, options, recorder=recorder, verbose=verbose, selector=selector)
    except (RepairError, ValueError) as e:
        raise InputError(str(e)) from e
    if recorder is not None:
        recorder.write(trace)
        logger.info("wrote %d trace records to %s", len(recorder.records), trace)
    _emit(report, output_format)
    ctx.exit(STATUS_EXIT_CODES[report.status])


@cli.command("oracle")
@click.argument("problem_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@criterion_option
@format_option
@click.option("--all-repairs", is_flag=True, help="Report every repair, not only the preferred ones.")
@click.option("--cap", type=click.IntRange(min=1), default=None, help="Largest atom universe to enumerate.")
@click.option("--fresh-constant", is_flag=True, help="Add one constant outside the database to the domain.")
@data_option
@verbose_option
def oracle_command(
    problem_file: Path,
    criterion: str | None,
    output_format: str,
    all_repairs: bool,
    cap: int | None,
    fresh_constant: bool,
    data: Path | None,
    verbose: bool,
) -> None:
    """Compute the repairs of a small PROBLEM_FILE by model enumeration."""
    _configure_logging(verbose)
    problem = _load(problem_file, data, verbose)
    options = _options(
        problem,
        criterion=criterion,
        all_repairs=all_repairs or None,
        oracle_cap=cap,
        oracle_fresh_constant=fresh_constant or None,
    )
    try:
        report = run_oracle(problem, options, verbose=verbose)
    except RepairError as e:
        raise InputError(str(e)) from e
    _emit(report, output_format)


def main() -> None:
    cli(prog_name="repairdb")


if __name__ == "__main__":  # pragma: no cover
    main()
