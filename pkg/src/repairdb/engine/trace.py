"""Replay logs: one ``step <n> rule <id> goal <index> branch <index>`` line per step.

A log is a path from the root of the search tree: record ``n`` is the rule
applied to the state at depth ``n - 1``, the index of the goal it rewrote and
the branch taken.
"""

from __future__ import annotations

import re
import threading
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

_RECORD = re.compile(r"^step (\d+) rule (\S+) goal (\d+) branch (\d+)$")


@dataclass(frozen=True)
class TraceRecord:
    step: int
    rule: str
    goal: int
    branch: int

    def __str__(self) -> str:
        return f"step {self.step} rule {self.rule} goal {self.goal} branch {self.branch}"

    @classmethod
    def parse(cls, line: str) -> TraceRecord:
        match = _RECORD.match(line.strip())
        if match is None:
            raise ValueError(f"Not a trace record: {line!r}")
        step, rule, goal, branch = match.groups()
        return cls(int(step), rule, int(goal), int(branch))


class TraceRecorder:
    """Keeps the derivation path of the first solution reached."""

    def __init__(self):
        self.records: list[TraceRecord] = []
        self._taken = False
        self._lock = threading.Lock()

    def offer_path(self, path: Iterable[TraceRecord]) -> bool:
        """Record ``path`` unless a path was recorded already."""
        with self._lock:
            if self._taken:
                return False
            self.records = list(path)
            self._taken = True
            return True

    def lines(self) -> list[str]:
        return [str(r) for r in self.records]

    def write(self, path: str | Path) -> None:
        Path(path).write_text("".join(f"{line}\n" for line in self.lines()))


def read_trace(source: str | Path | Iterable[str]) -> list[TraceRecord]:
    """Parse a replay log from a path or from lines; blank lines are skipped.

    Raises:
        ValueError: For malformed lines or steps out of sequence.
    """
    lines = Path(source).read_text().splitlines() if isinstance(source, (str, Path)) else source
    records = [TraceRecord.parse(line) for line in lines if line.strip()]
    for expected, record in enumerate(records, start=1):
        if record.step != expected:
            raise ValueError(f"Trace record {record} out of sequence, expected step {expected}.")
    return records
