import logging
from pathlib import Path

import pandas as pd

from repairdb.composer.database import DatabaseInstance
from repairdb.exceptions import SchemaError
from repairdb.logic.terms import Atom, Constant, integer

logger = logging.getLogger(__name__)

TIMESTAMP_COLUMN = "timestamp"


def _constant(value, filename: Path) -> Constant:
    if pd.isna(value):
        raise SchemaError(f"Missing value in fact table {filename}.")
    if isinstance(value, bool):
        return Constant(str(value).lower())
    if isinstance(value, float) and value.is_integer():
        return integer(int(value))
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, int):
        return integer(value)
    return Constant(str(value))


def read_fact_table(filename: Path) -> tuple[list[Atom], dict[Atom, int]]:
    """Rows of one table as facts of the predicate named by the file stem.

    A column called ``timestamp`` is not an argument; it gives the time at
    which the row's fact was added.
    """
    filename = Path(filename)
    if filename.suffix == ".csv":
        df = pd.read_csv(filename)
    elif filename.suffix == ".feather":
        df = pd.read_feather(filename)
    else:
        raise NotImplementedError(f"Suffix {filename.suffix} not implemented")
    timestamps = df.pop(TIMESTAMP_COLUMN) if TIMESTAMP_COLUMN in df.columns else None
    facts: list[Atom] = []
    times: dict[Atom, int] = {}
    for i, row in enumerate(df.itertuples(index=False, name=None)):
        fact = Atom(filename.stem, tuple(_constant(v, filename) for v in row))
        facts.append(fact)
        if timestamps is not None and not pd.isna(timestamps.iloc[i]):
            times[fact] = int(timestamps.iloc[i])
    return facts, times


def load_fact_tables(
    data_dir: Path, verbose: bool = False, suffixes: tuple[str, ...] = (".csv", ".feather")
) -> list[DatabaseInstance]:
    """Load every fact table below ``data_dir``, one source per directory.

    Tables directly inside ``data_dir`` belong to a source named after
    ``data_dir`` itself.

    Args:
        data_dir (Path): Root directory.
        verbose (bool, optional): Log every file at INFO level.
        suffixes (tuple[str, ...], optional): Table formats to read.

    Returns:
        list[DatabaseInstance]: Sources in directory order.
    """
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise ValueError(f"data_dir must be a directory, got {data_dir}.")
    facts: dict[str, list[Atom]] = {}
    timestamps: dict[str, dict[Atom, int]] = {}
    for filename in sorted(data_dir.rglob("*")):
        if filename.is_dir() or filename.suffix not in suffixes:
            continue
        logger.log(logging.INFO if verbose else logging.DEBUG, "reading %s", filename)
        source = filename.parent.name
        rows, times = read_fact_table(filename)
        facts.setdefault(source, []).extend(rows)
        timestamps.setdefault(source, {}).update(times)
    return [DatabaseInstance(frozenset(facts[s]), s, timestamps[s]) for s in facts]
