"""Task registry: manifest loading and ground-truth validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from layoutbench.errors import LayoutBenchError
from layoutbench.evaluate.classify import classify
from layoutbench.evaluate.verdicts import EvalOptions
from layoutbench.evaluate.via_rules import ViaRuleSet
from layoutbench.gdsii.flatten import FlatLayout, flatten
from layoutbench.gdsii.stream import parse_gdsii

CATEGORIES = ("basic_shapes_1", "basic_shapes_2", "advanced_shapes", "complex_structures")
EXPECTED_CATEGORY_COUNTS = {
    "basic_shapes_1": 6,
    "basic_shapes_2": 6,
    "advanced_shapes": 6,
    "complex_structures": 7,
}
TASK_COUNT = 25


class ManifestInvalid(LayoutBenchError):
    pass


class GroundTruthFailsSelfCheck(LayoutBenchError):
    pass


@dataclass(frozen=True)
class _OkOutcome:
    status: str = "ok"


@dataclass(frozen=True)
class TaskSpec:
    id: str
    category: str
    prompt: str
    ground_truth_files: tuple[str, ...]
    ground_truth_layouts: tuple[FlatLayout, ...]
    eval_options: EvalOptions = field(default_factory=EvalOptions)
    via_rules: Optional[ViaRuleSet] = None
    low_confidence: bool = False
    notes: str = ""

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("task prompt must be nonempty")
        if not self.ground_truth_layouts:
            raise ValueError("task needs at least one ground truth")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")


def _parse_via_rules(raw: dict) -> ViaRuleSet:
    raw = dict(raw)
    raw["via_centers"] = tuple(tuple(c) for c in raw["via_centers"])
    return ViaRuleSet(**raw)


def load_tasks(manifest_dir: Path, validate: bool = True) -> list[TaskSpec]:
    """Load the task manifest and its committed ground-truth files.

    Checks the 25-task layout, parses every ground truth, and (unless
    disabled) confirms each self-classifies correct, which ties the
    benchmark fixtures to the evaluator's identity invariant.
    """
    manifest_dir = Path(manifest_dir)
    manifest_path = manifest_dir / "manifest.json"
    if not manifest_path.exists():
        raise ManifestInvalid(f"no manifest.json under {manifest_dir}")
    try:
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestInvalid(f"manifest is not valid JSON: {exc}") from exc
    entries = raw.get("tasks")
    if not isinstance(entries, list) or not entries:
        raise ManifestInvalid("manifest has no tasks list")

    tasks: list[TaskSpec] = []
    for entry in entries:
        try:
            task_id = entry["id"]
            category = entry["category"]
            prompt = entry["prompt"]
            files = entry["ground_truths"]
        except (KeyError, TypeError) as exc:
            raise ManifestInvalid(f"task entry missing field: {exc}") from exc
        layouts = []
        for rel in files:
            gds_path = manifest_dir / rel
            if not gds_path.exists():
                raise ManifestInvalid(f"task {task_id}: missing ground truth {rel}")
            try:
                layouts.append(flatten(parse_gdsii(gds_path.read_bytes())))
            except LayoutBenchError as exc:
                raise ManifestInvalid(f"task {task_id}: unreadable ground truth {rel}: {exc}")
        try:
            opts = EvalOptions(**{k: _coerce_opt(k, v) for k, v in entry.get("eval", {}).items()})
            rules = _parse_via_rules(entry["via_rules"]) if entry.get("via_rules") else None
        except (TypeError, ValueError, KeyError) as exc:
            raise ManifestInvalid(f"task {task_id}: bad eval/rule options: {exc}") from exc
        try:
            tasks.append(
                TaskSpec(
                    id=task_id,
                    category=category,
                    prompt=prompt,
                    ground_truth_files=tuple(files),
                    ground_truth_layouts=tuple(layouts),
                    eval_options=opts,
                    via_rules=rules,
                    low_confidence=bool(entry.get("low_confidence", False)),
                    notes=entry.get("notes", ""),
                )
            )
        except ValueError as exc:
            raise ManifestInvalid(f"task {task_id}: {exc}") from exc

    ids = [t.id for t in tasks]
    if len(ids) != len(set(ids)):
        raise ManifestInvalid("duplicate task ids in manifest")
    if len(tasks) != TASK_COUNT:
        raise ManifestInvalid(f"expected {TASK_COUNT} tasks, found {len(tasks)}")
    counts = {c: sum(1 for t in tasks if t.category == c) for c in CATEGORIES}
    if counts != EXPECTED_CATEGORY_COUNTS:
        raise ManifestInvalid(f"category counts {counts} != {EXPECTED_CATEGORY_COUNTS}")

    if validate:
        for task in tasks:
            for idx, truth in enumerate(task.ground_truth_layouts):
                verdict = classify(_OkOutcome(), truth, task)
                if verdict.category != "correct":
                    raise GroundTruthFailsSelfCheck(
                        f"task {task.id} ground truth #{idx} self-classifies "
                        f"{verdict.category}: {verdict.evidence}"
                    )
    return tasks


def _coerce_opt(key: str, value):
    if key == "scale_hypotheses":
        return tuple(value)
    return value


def task_by_id(tasks: list[TaskSpec], task_id: str) -> TaskSpec:
    for task in tasks:
        if task.id == task_id:
            return task
    raise ManifestInvalid(f"unknown task id {task_id!r}")
