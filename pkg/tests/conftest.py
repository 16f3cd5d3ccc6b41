"""
Shared fixtures for the repairdb tests.

Read more about conftest.py under:
- https://docs.pytest.org/en/stable/fixture.html
"""

from pathlib import Path

import pytest

from repairdb.io.parser import ProblemFile, read_problem

__author__ = "gunthergl_r2"
__copyright__ = "gunthergl_r2"
__license__ = "MIT"

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def load_example():
    def load(name: str) -> ProblemFile:
        return read_problem(DATA_DIR / f"{name}.rdb")

    return load
