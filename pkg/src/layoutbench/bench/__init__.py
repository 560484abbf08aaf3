from layoutbench.bench.tasks import (
    CATEGORIES as TASK_CATEGORIES,
    EXPECTED_CATEGORY_COUNTS,
    GroundTruthFailsSelfCheck,
    ManifestInvalid,
    TaskSpec,
    load_tasks,
    task_by_id,
)
from layoutbench.bench.matrix import (
    ResultSet,
    RunKey,
    RunRecord,
    load_results,
    record_from_thought,
    run_matrix,
)
from layoutbench.bench.aggregate import (
    CategoryTable,
    Override,
    OverrideFile,
    UnknownOverrideKey,
    aggregate,
    load_overrides,
)
from layoutbench.bench.report import render_report
from layoutbench.bench.author import default_task_dir, write_task_data

__all__ = [
    "CategoryTable",
    "EXPECTED_CATEGORY_COUNTS",
    "GroundTruthFailsSelfCheck",
    "ManifestInvalid",
    "Override",
    "OverrideFile",
    "ResultSet",
    "RunKey",
    "RunRecord",
    "TASK_CATEGORIES",
    "TaskSpec",
    "UnknownOverrideKey",
    "aggregate",
    "default_task_dir",
    "load_overrides",
    "load_results",
    "load_tasks",
    "record_from_thought",
    "render_report",
    "run_matrix",
    "task_by_id",
    "write_task_data",
]
