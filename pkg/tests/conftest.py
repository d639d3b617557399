import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scaffolder.scoring import default_scoring_table, ground_truth_map


@pytest.fixture(scope="session")
def default_table():
    return default_scoring_table()


@pytest.fixture(scope="session")
def truth(default_table):
    return ground_truth_map(default_table)


@pytest.fixture(scope="session")
def data_dir():
    return Path(__file__).parent / "data"
