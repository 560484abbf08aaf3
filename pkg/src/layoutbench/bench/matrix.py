"""Run-matrix execution over tasks and backends, with resume support.

Records append to ``results.jsonl`` under the output directory as they
complete; rerunning skips (task, mode, backend, run) keys already on
disk, so an interrupted matrix picks up where it left off.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from layoutbench.llm.backends import Backend
from layoutbench.sandbox.run import ExecutionLimits
from layoutbench.bench.tasks import TaskSpec
from layoutbench.flow.assessor import run_solomon
from layoutbench.flow.pipeline import generate_pool, run_one
from layoutbench.flow.thoughts import SteeringConfig, Thought

RESULTS_NAME = "results.jsonl"


@dataclass(frozen=True)
class RunKey:
    task_id: str
    mode: str  # "baseline" | "solomon"
    backend_id: str
    run_index: int

    def as_tuple(self):
        return (self.task_id, self.mode, self.backend_id, self.run_index)


@dataclass(frozen=True)
class RunRecord:
    task_id: str
    task_category: str
    mode: str
    backend_id: str
    run_index: int
    category: str
    best_scale: float
    per_layer_scores: dict
    confidence: float
    evidence: str
    matched_ground_truth: int
    exec_status: str
    exec_duration_s: float
    code_present: bool
    stderr_tail: str
    render_path: str = ""
    pool_size: int = 0

    def key(self) -> RunKey:
        return RunKey(self.task_id, self.mode, self.backend_id, self.run_index)


@dataclass
class ResultSet:
    records: list[RunRecord] = field(default_factory=list)
    config_snapshot: dict = field(default_factory=dict)

    def keys(self) -> set[tuple]:
        return {r.key().as_tuple() for r in self.records}

    def add(self, record: RunRecord) -> None:
        if record.key().as_tuple() in self.keys():
            raise ValueError(f"duplicate run key {record.key()}")
        self.records.append(record)


def load_results(out_dir: Path) -> ResultSet:
    path = Path(out_dir) / RESULTS_NAME
    results = ResultSet()
    if not path.exists():
        return results
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            results.records.append(RunRecord(**json.loads(line)))
    return results


def _append_record(out_dir: Path, record: RunRecord) -> None:
    path = Path(out_dir) / RESULTS_NAME
    with path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(asdict(record), sort_keys=True) + "\n")


def _stderr_tail(thought: Thought, cap: int = 2000) -> str:
    if thought.outcome is None:
        return ""
    return thought.outcome.stderr[-cap:]


def record_from_thought(
    task: TaskSpec, mode: str, thought: Thought, render_path: str = "", pool_size: int = 0
) -> RunRecord:
    verdict = thought.verdict
    return RunRecord(
        task_id=task.id,
        task_category=task.category,
        mode=mode,
        backend_id=thought.backend_id,
        run_index=thought.run_index,
        category=verdict.category if verdict else "runtime_error",
        best_scale=verdict.best_scale if verdict else 1.0,
        per_layer_scores=dict(verdict.per_layer_scores) if verdict else {},
        confidence=verdict.confidence if verdict else 0.0,
        evidence=verdict.evidence if verdict else "",
        matched_ground_truth=verdict.matched_ground_truth if verdict else -1,
        exec_status=thought.outcome.status if thought.outcome else "missing",
        exec_duration_s=thought.outcome.duration_s if thought.outcome else 0.0,
        code_present=thought.code is not None,
        stderr_tail=_stderr_tail(thought),
        render_path=render_path,
        pool_size=pool_size,
    )


def _save_render(out_dir: Path, task: TaskSpec, mode: str, thought: Thought) -> str:
    if thought.render_png is None:
        return ""
    rel = Path("renders") / task.id / f"{mode}-{thought.backend_id}-r{thought.run_index}.png"
    path = Path(out_dir) / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(thought.render_png)
    return str(rel)


def run_matrix(
    tasks: Sequence[TaskSpec],
    generators: Sequence[Backend],
    mode: str,
    out_dir: Path,
    runs_per_backend: int = 5,
    assessors: Sequence[Backend] = (),
    steering: Optional[SteeringConfig] = None,
    limits: Optional[ExecutionLimits] = None,
    resume: bool = True,
    max_workers: Optional[int] = None,
) -> ResultSet:
    """Execute the benchmark protocol and persist records incrementally.

    baseline: every (task, generator, run) gets one record.
    solomon: per task one shared thought pool (generators x runs), then
    one refined record per configured assessor.
    """
    if mode not in ("baseline", "solomon"):
        raise ValueError(f"matrix mode must be baseline or solomon, got {mode!r}")
    if mode == "solomon" and not assessors:
        raise ValueError("solomon mode needs at least one assessor backend")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    steering = steering or SteeringConfig()
    limits = limits or ExecutionLimits()
    workroot = out_dir / "work"

    existing = load_results(out_dir) if resume else ResultSet()
    done = existing.keys()
    results = ResultSet(records=list(existing.records))

    for task in tasks:
        if mode == "baseline":
            for backend in generators:
                for run_index in range(runs_per_backend):
                    key = (task.id, "baseline", backend.cfg.id, run_index)
                    if key in done:
                        continue
                    thought = run_one(
                        task, backend, run_index, steering, limits,
                        workroot / task.id, ("LayoutViewer",),
                    )
                    render = _save_render(out_dir, task, "baseline", thought)
                    record = record_from_thought(task, "baseline", thought, render)
                    results.add(record)
                    _append_record(out_dir, record)
        else:
            missing = [
                a for a in assessors if (task.id, "solomon", a.cfg.id, 0) not in done
            ]
            if not missing:
                continue
            pool_render = any(a.cfg.supports_images for a in assessors)
            pool = generate_pool(
                task, generators, runs_per_backend, steering, limits,
                workroot / task.id, max_workers=max_workers, render=pool_render,
            )
            for assessor in missing:
                thought = run_solomon(
                    task, pool, assessor, steering, limits, workroot / task.id
                )
                render = _save_render(out_dir, task, "solomon", thought)
                record = record_from_thought(
                    task, "solomon", thought, render, pool_size=len(pool.thoughts)
                )
                results.add(record)
                _append_record(out_dir, record)
    return results
