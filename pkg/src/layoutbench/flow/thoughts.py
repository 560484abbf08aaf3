"""Thought values, pools, and steering configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from layoutbench.errors import LayoutBenchError
from layoutbench.evaluate.verdicts import Verdict
from layoutbench.gdsii.flatten import FlatLayout
from layoutbench.llm.types import ChatResponse
from layoutbench.sandbox.run import ExecutionOutcome

STEERING_STAGES = ("generator_system_suffix", "assessor_goal", "assessor_focus")


class EmptyPool(LayoutBenchError):
    pass


@dataclass(frozen=True)
class SteeringConfig:
    """Human-edited prompt fragments injected per stage, plus attention
    knobs for the assessor request."""

    fragments: Mapping[str, str] = field(default_factory=dict)
    include_images: bool = True
    max_thoughts: int = 20
    error_log_tail_bytes: int = 4096

    def __post_init__(self):
        unknown = set(self.fragments) - set(STEERING_STAGES)
        if unknown:
            raise ValueError(f"unknown steering stages: {sorted(unknown)}")
        if self.max_thoughts < 1:
            raise ValueError("max_thoughts must be >= 1")

    def fragment(self, stage: str) -> str:
        return self.fragments.get(stage, "")


def load_steering(path: Path) -> SteeringConfig:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return SteeringConfig(
        fragments={k: v for k, v in raw.get("fragments", {}).items()},
        include_images=raw.get("include_images", True),
        max_thoughts=raw.get("max_thoughts", 20),
        error_log_tail_bytes=raw.get("error_log_tail_bytes", 4096),
    )


@dataclass(frozen=True)
class Thought:
    """One candidate solution with everything learned about it."""

    thought_id: str
    backend_id: str
    run_index: int
    response: Optional[ChatResponse] = None
    code: Optional[str] = None
    outcome: Optional[ExecutionOutcome] = None
    layout: Optional[FlatLayout] = None
    render_png: Optional[bytes] = None
    verdict: Optional[Verdict] = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.layout is not None and (self.outcome is None or self.outcome.status != "ok"):
            raise ValueError("a parsed layout requires an ok execution outcome")
        if self.render_png is not None and self.layout is None:
            raise ValueError("a render requires a parsed layout")


@dataclass(frozen=True)
class ThoughtPool:
    task_id: str
    thoughts: tuple[Thought, ...]
    provenance: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        ids = [t.thought_id for t in self.thoughts]
        if len(ids) != len(set(ids)):
            raise ValueError("thought ids must be unique within a pool")

    def ordered(self) -> tuple[Thought, ...]:
        return tuple(sorted(self.thoughts, key=lambda t: (t.backend_id, t.run_index)))
