import json

import pandas as pd
import pytest
from click.testing import CliRunner

from repairdb import cli as cli_module
from repairdb.cli import cli
from repairdb.report import RepairReport

__author__ = "gunthergl_r2"
__copyright__ = "gunthergl_r2"
__license__ = "MIT"


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def report_of(result) -> dict:
    return json.loads(result.stdout.splitlines()[0])


def test_run_json(runner, data_dir):
    result = runner.invoke(cli, ["run", str(data_dir / "teaches.rdb")])
    assert result.exit_code == 0, result.output
    report = report_of(result)
    assert report["status"] == "complete"
    assert [r["retract"] for r in report["repairs"]] == [["teaches(c2, n2)"], ["teaches(c2, n3)"]]


def test_run_is_byte_stable(runner, data_dir):
    args = ["run", str(data_dir / "supply.rdb"), "--criterion", "cardinality"]
    first, second = runner.invoke(cli, args), runner.invoke(cli, args)
    assert first.exit_code == 0
    assert first.stdout == second.stdout


def test_run_text(runner, data_dir):
    result = runner.invoke(cli, ["run", str(data_dir / "pq.rdb"), "--format", "text"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[:4] == ["status: complete", "repairs: 2", "  1. ({}, {p(b)})", "  2. ({q(b)}, {})"]


def test_run_ground(runner, data_dir):
    result = runner.invoke(cli, ["run", str(data_dir / "courses.rdb"), "--ground"])
    assert result.exit_code == 0
    open_repairs = [r for r in report_of(result)["repairs"] if r["insert"] == ["teaches(_V1, n3)"]]
    assert open_repairs
    assert {"_V1": "fresh"} in open_repairs[0]["groundings"]


def test_budget_exit_code(runner, data_dir):
    result = runner.invoke(cli, ["run", str(data_dir / "teaches.rdb"), "--max-steps", "1"])
    assert result.exit_code == 2
    assert report_of(result)["status"] == "budget_exhausted"


def test_floundered_exit_code(runner, data_dir, monkeypatch):
    monkeypatch.setattr(cli_module, "run", lambda *args, **kwargs: RepairReport(repairs=[], status="floundered"))
    result = runner.invoke(cli, ["run", str(data_dir / "teaches.rdb")])
    assert result.exit_code == 3


def test_check(runner, data_dir):
    result = runner.invoke(cli, ["run", str(data_dir / "pq.rdb"), "--check"])
    assert result.exit_code == 0, result.output
    assert "engine and oracle agree on 2 repairs" in result.output


def test_check_reports_differences(runner, data_dir, monkeypatch):
    from repairdb.pipeline import CheckResult

    def disagree(problem, options, verbose=False):
        empty = RepairReport(repairs=[])
        return CheckResult(empty, empty, ("({}, {p(b)})",), ())

    monkeypatch.setattr(cli_module, "check", disagree)
    result = runner.invoke(cli, ["run", str(data_dir / "pq.rdb"), "--check"])
    assert result.exit_code == 1
    assert "only the oracle found: ({}, {p(b)})" in result.output


def test_check_over_cap(runner, data_dir):
    result = runner.invoke(cli, ["run", str(data_dir / "courses.rdb"), "--check"])
    assert result.exit_code == 4
    assert "cap" in result.output


def test_trace_and_replay(runner, data_dir, tmp_path):
    problem = str(data_dir / "teaches.rdb")
    log = tmp_path / "trace.log"
    recorded = runner.invoke(cli, ["run", problem, "--trace", str(log)])
    assert recorded.exit_code == 0
    lines = log.read_text().splitlines()
    assert lines and lines[0].startswith("step 1 rule ")

    # the replay follows the recorded branch only, down to its solution
    replayed = runner.invoke(cli, ["run", problem, "--replay", str(log)])
    assert replayed.exit_code == 0
    (repair,) = report_of(replayed)["repairs"]
    assert repair in report_of(recorded)["repairs"]


@pytest.mark.parametrize(
    "args",
    [
        ["run", "missing.rdb"],
        ["run", "{data}/teaches.rdb", "--criterion", "best"],
        ["run", "{data}/teaches.rdb", "--sources", "--timestamps"],
        ["run", "{data}/teaches.rdb", "--max-steps", "0"],
        ["oracle", "{data}/sensors.rdb"],
        ["frobnicate"],
    ],
)
def test_usage_errors(runner, data_dir, args):
    result = runner.invoke(cli, [a.format(data=data_dir) for a in args])
    assert result.exit_code == 4, result.output


def test_syntax_error(runner, tmp_path):
    problem = tmp_path / "broken.rdb"
    problem.write_text("fact p(a).\nconstraint p(a) -> .\n")
    result = runner.invoke(cli, ["run", str(problem)])
    assert result.exit_code == 4
    assert "line 2" in result.output


def test_oracle(runner, data_dir):
    result = runner.invoke(cli, ["oracle", str(data_dir / "propositional.rdb"), "--all-repairs"])
    assert result.exit_code == 0, result.output
    report = report_of(result)
    assert len(report["repairs"]) == 6
    assert report["stats"]["models"] == 6


def test_data_directory(runner, tmp_path):
    for source, rows in {"db1": [("c1", "n1"), ("c2", "n2")], "db2": [("c2", "n3")]}.items():
        (tmp_path / "data" / source).mkdir(parents=True)
        table = pd.DataFrame(rows, columns=["course", "teacher"])
        table.to_csv(tmp_path / "data" / source / "teaches.csv", index=False)
    problem = tmp_path / "teaches.rdb"
    problem.write_text("constraint forall X, Y, Z: teaches(X, Y) & teaches(X, Z) -> Y = Z.\n")
    result = runner.invoke(cli, ["run", str(problem), "--data", str(tmp_path / "data")])
    assert result.exit_code == 0, result.output
    assert len(report_of(result)["repairs"]) == 2


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "repairdb" in result.output
