"""Assessor pass: one request summarizing the pool, one refined thought.

The request lists every thought's code, execution status and error-log
tail in a fixed order, optionally with its rendered image, and asks the
model to weigh consensus against disagreement before emitting a single
code block.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional, Sequence

from layoutbench.llm.backends import Backend, BackendUnavailable, ImageUnsupported, ReplayMiss
from layoutbench.llm.types import Attachment, ChatMessage, ChatRequest
from layoutbench.sandbox.run import ExecutionLimits
from layoutbench.evaluate.verdicts import Verdict
from layoutbench.flow.pipeline import load_prompt, realize_thought
from layoutbench.flow.thoughts import EmptyPool, SteeringConfig, Thought, ThoughtPool


def _log_tail(text: str, cap: int) -> str:
    data = text.encode("utf-8")
    if len(data) <= cap:
        return text
    tail = data[-cap:]
    cut = tail.find(b"\n")
    if 0 <= cut < len(tail) - 1:
        tail = tail[cut + 1 :]
    return tail.decode("utf-8", "replace")


def _thought_section(index: int, thought: Thought, steering: SteeringConfig) -> str:
    lines = [f"--- Thought {index} (generator {thought.backend_id}, run {thought.run_index}) ---"]
    if thought.code:
        lines.append("Code:")
        lines.append("```python")
        lines.append(thought.code.rstrip("\n"))
        lines.append("```")
    else:
        lines.append("No code was produced.")
    if thought.outcome is not None:
        status = thought.outcome.status
        if thought.outcome.exit_code is not None:
            status += f" (exit {thought.outcome.exit_code})"
        lines.append(f"Execution status: {status}")
        tail = _log_tail(thought.outcome.stderr, steering.error_log_tail_bytes)
        if tail.strip():
            lines.append("Error log (tail):")
            lines.append(tail.rstrip("\n"))
    else:
        lines.append("Execution status: not executed")
    lines.append("")
    return "\n".join(lines)


def build_assessor_prompt(
    task, pool: ThoughtPool, steering: SteeringConfig, assessor_cfg
) -> ChatRequest:
    """Deterministic assessor request for a pool.

    Thought sections are ordered by (backend id, run index) and capped
    at ``steering.max_thoughts``; identical inputs produce an identical
    request and therefore an identical replay digest.
    """
    if not pool.thoughts:
        raise EmptyPool(f"pool for task {pool.task_id!r} has no thoughts")
    chosen = pool.ordered()[: steering.max_thoughts]

    goal = steering.fragment("assessor_goal")
    goal_text = goal + "\n\n" if goal else ""
    focus = steering.fragment("assessor_focus")
    focus_text = focus + "\n" if focus else ""
    sections = "".join(
        _thought_section(i + 1, t, steering) + "\n" for i, t in enumerate(chosen)
    )
    body = load_prompt("assessor_template.txt").format(
        goal=goal_text,
        task_prompt=task.prompt,
        sections=sections,
        focus=focus_text,
    )

    attachments = []
    if steering.include_images and assessor_cfg.supports_images:
        for i, thought in enumerate(chosen):
            if thought.render_png is not None:
                attachments.append(
                    Attachment(
                        label=f"Rendered layout image for thought {i + 1}:",
                        png=thought.render_png,
                    )
                )
    message = ChatMessage(role="user", text=body, attachments=tuple(attachments))
    return ChatRequest(
        backend_id=assessor_cfg.id,
        system_prompt=load_prompt("assessor_system.txt"),
        messages=(message,),
        temperature=assessor_cfg.temperature_assess,
        max_output_tokens=assessor_cfg.max_output_tokens,
        request_tag=f"{task.id}:assess:0",
    )


def pool_digest(pool: ThoughtPool) -> str:
    payload = json.dumps(pool.provenance, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def run_solomon(
    task,
    pool: ThoughtPool,
    assessor: Backend,
    steering: SteeringConfig,
    limits: ExecutionLimits,
    workdir_root: Path,
    blocklist: Sequence[str] = ("LayoutViewer",),
) -> Thought:
    """Assess the pool and realize the refined solution end to end."""
    request = build_assessor_prompt(task, pool, steering, assessor.cfg)
    thought_id = f"assessor:{assessor.cfg.id}"
    notes = (f"pool:{pool_digest(pool)}", f"pool_size:{len(pool.thoughts)}")
    try:
        response = assessor.complete(request)
    except (BackendUnavailable, ReplayMiss, ImageUnsupported) as exc:
        return Thought(
            thought_id=thought_id,
            backend_id=assessor.cfg.id,
            run_index=0,
            verdict=Verdict(category="runtime_error", evidence=f"backend error: {exc}"),
            notes=notes + (f"backend error: {exc}",),
        )
    refined = realize_thought(
        thought_id,
        assessor.cfg.id,
        0,
        response,
        task,
        limits,
        workdir_root,
        blocklist,
    )
    return Thought(
        thought_id=refined.thought_id,
        backend_id=refined.backend_id,
        run_index=refined.run_index,
        response=refined.response,
        code=refined.code,
        outcome=refined.outcome,
        layout=refined.layout,
        render_png=refined.render_png,
        verdict=refined.verdict,
        notes=notes + refined.notes,
    )
