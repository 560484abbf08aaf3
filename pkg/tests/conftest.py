import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make helpers importable

from layoutbench.bench.author import default_task_dir
from layoutbench.bench.tasks import load_tasks


@pytest.fixture(scope="session")
def task_dir() -> Path:
    return default_task_dir()


@pytest.fixture(scope="session")
def tasks(task_dir):
    # Self-classification is exercised explicitly in the acceptance suite;
    # skipping it here keeps the unit tests quick.
    return load_tasks(task_dir, validate=False)


@pytest.fixture(scope="session")
def task_map(tasks):
    return {t.id: t for t in tasks}


class OkOutcome:
    status = "ok"


@pytest.fixture(scope="session")
def ok_outcome():
    return OkOutcome()
