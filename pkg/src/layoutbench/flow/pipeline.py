"""Generation pipeline: prompt, complete, extract, execute, score.

Every stage failure downgrades the thought gracefully (absent code, a
runtime_error verdict) instead of aborting the batch.
"""

from __future__ import annotations

import tempfile
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from layoutbench.evaluate.classify import classify
from layoutbench.evaluate.verdicts import Verdict
from layoutbench.gdsii.flatten import FlatLayout, flatten
from layoutbench.gdsii.stream import parse_gdsii
from layoutbench.geometry.png import render_layout_png
from layoutbench.llm.backends import Backend, BackendUnavailable, ImageUnsupported, ReplayMiss
from layoutbench.llm.types import ChatMessage, ChatRequest
from layoutbench.sandbox.extract import NoCodeBlock, extract_code, sanitize
from layoutbench.sandbox.run import (
    ExecutionLimits,
    SpawnFailure,
    default_worker_count,
    execute,
)
from layoutbench.flow.thoughts import SteeringConfig, Thought, ThoughtPool


def load_prompt(name: str) -> str:
    return resources.files("layoutbench.prompts").joinpath(name).read_text(encoding="utf-8")


def generator_system_prompt(steering: SteeringConfig) -> str:
    base = load_prompt("generator_system.txt")
    suffix = steering.fragment("generator_system_suffix")
    return base + ("\n" + suffix + "\n" if suffix else "")


def build_generator_request(
    task, backend_cfg, run_index: int, steering: SteeringConfig
) -> ChatRequest:
    return ChatRequest(
        backend_id=backend_cfg.id,
        system_prompt=generator_system_prompt(steering),
        messages=(ChatMessage(role="user", text=task.prompt),),
        temperature=backend_cfg.temperature_generate,
        max_output_tokens=backend_cfg.max_output_tokens,
        request_tag=f"{task.id}:generate:{run_index}",
    )


def realize_thought(
    thought_id: str,
    backend_id: str,
    run_index: int,
    response,
    task,
    limits: ExecutionLimits,
    workdir_root: Path,
    blocklist: Sequence[str],
    render: bool = True,
) -> Thought:
    """Run the post-completion stages for one response."""
    notes: list[str] = []
    if response is None:
        return Thought(
            thought_id=thought_id,
            backend_id=backend_id,
            run_index=run_index,
            verdict=Verdict(category="runtime_error", evidence="backend produced no response"),
            notes=tuple(notes),
        )

    try:
        extracted = extract_code(response.text)
    except NoCodeBlock as exc:
        return Thought(
            thought_id=thought_id,
            backend_id=backend_id,
            run_index=run_index,
            response=response,
            verdict=Verdict(category="runtime_error", evidence=str(exc)),
            notes=("no code block",),
        )
    notes.extend(extracted.warnings)
    cleaned = sanitize(extracted.source, blocklist)
    if cleaned.hits:
        notes.append(f"sanitizer removed {len(cleaned.hits)} line(s)")

    workdir_root.mkdir(parents=True, exist_ok=True)
    workdir = Path(tempfile.mkdtemp(prefix=f"{backend_id}-r{run_index}-", dir=workdir_root))
    try:
        outcome = execute(cleaned.source, limits, workdir, sanitizer_hits=cleaned.hits)
    except SpawnFailure as exc:
        return Thought(
            thought_id=thought_id,
            backend_id=backend_id,
            run_index=run_index,
            response=response,
            code=cleaned.source,
            verdict=Verdict(category="runtime_error", evidence=f"spawn failure: {exc}"),
            notes=tuple(notes),
        )

    layout: Optional[FlatLayout] = None
    render_png: Optional[bytes] = None
    if outcome.status == "ok":
        payload = outcome.primary_payload()
        try:
            layout = flatten(parse_gdsii(payload))
        except Exception as exc:  # any parse/flatten fault downgrades the run
            notes.append(f"artifact unparseable: {exc}")
            layout = None
        if layout is not None and render:
            render_png = render_layout_png(layout)

    verdict = classify(outcome, layout, task)
    return Thought(
        thought_id=thought_id,
        backend_id=backend_id,
        run_index=run_index,
        response=response,
        code=cleaned.source,
        outcome=outcome,
        layout=layout,
        render_png=render_png,
        verdict=verdict,
        notes=tuple(notes),
    )


def run_one(
    task,
    backend: Backend,
    run_index: int,
    steering: SteeringConfig,
    limits: ExecutionLimits,
    workdir_root: Path,
    blocklist: Sequence[str],
    render: bool = True,
) -> Thought:
    thought_id = f"{backend.cfg.id}:{run_index}"
    request = build_generator_request(task, backend.cfg, run_index, steering)
    try:
        response = backend.complete(request)
    except (BackendUnavailable, ReplayMiss, ImageUnsupported) as exc:
        return Thought(
            thought_id=thought_id,
            backend_id=backend.cfg.id,
            run_index=run_index,
            verdict=Verdict(category="runtime_error", evidence=f"backend error: {exc}"),
            notes=(f"backend error: {exc}",),
        )
    return realize_thought(
        thought_id,
        backend.cfg.id,
        run_index,
        response,
        task,
        limits,
        workdir_root,
        blocklist,
        render=render,
    )


def run_baseline(
    task,
    backend: Backend,
    runs: int,
    steering: SteeringConfig,
    limits: ExecutionLimits,
    workdir_root: Path,
    blocklist: Sequence[str] = ("LayoutViewer",),
    max_workers: Optional[int] = None,
) -> list[Thought]:
    """The single-model flow: `runs` independent generations of one task."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    workers = min(runs, max_workers or default_worker_count())
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_one, task, backend, i, steering, limits, workdir_root, blocklist)
            for i in range(runs)
        ]
        return [f.result() for f in futures]


def generate_pool(
    task,
    backends: Sequence[Backend],
    runs_per_backend: int,
    steering: SteeringConfig,
    limits: ExecutionLimits,
    workdir_root: Path,
    blocklist: Sequence[str] = ("LayoutViewer",),
    max_workers: Optional[int] = None,
    render: bool = True,
) -> ThoughtPool:
    """Fan generation out across backends and runs into one pool.

    ``render=False`` skips the per-thought PNGs; useful when no assessor
    will consume images.
    """
    if not backends:
        raise ValueError("need at least one generator backend")
    jobs = [(b, i) for b in backends for i in range(runs_per_backend)]
    workers = min(len(jobs), max_workers or default_worker_count())
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(
                run_one, task, b, i, steering, limits, workdir_root, blocklist,
                render,
            )
            for b, i in jobs
        ]
        thoughts = tuple(f.result() for f in futures)
    provenance = {
        "task_id": task.id,
        "generators": sorted(b.cfg.id for b in backends),
        "runs_per_backend": runs_per_backend,
        "generator_system_prompt": generator_system_prompt(steering),
        "steering": dict(steering.fragments),
    }
    return ThoughtPool(task_id=task.id, thoughts=thoughts, provenance=provenance)
