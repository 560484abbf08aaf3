"""Command-line entry point.

One command, five modes: ``baseline`` and ``solomon`` execute the run
matrix, ``evaluate-only`` scores a single GDSII file against a task,
``report`` renders the aggregation bundle, and ``interact`` runs the
terminal feedback loop.  Exit codes are a stable contract: 0 success,
2 configuration error; evaluate-only encodes the verdict (0 correct,
3 scaling_error, 4 partially_correct, 5 shape_error, 6 runtime_error).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from layoutbench.errors import ConfigError, LayoutBenchError
from layoutbench.evaluate.classify import classify
from layoutbench.gdsii.flatten import flatten
from layoutbench.gdsii.stream import parse_gdsii
from layoutbench.llm.backends import Backend, BackendsConfig, ReplayStore, build_backend, load_backends_config
from layoutbench.llm.types import ChatMessage, ChatRequest
from layoutbench.sandbox.run import ExecutionLimits
from layoutbench.bench.aggregate import aggregate, load_overrides
from layoutbench.bench.author import default_task_dir
from layoutbench.bench.matrix import load_results, run_matrix
from layoutbench.bench.report import render_report
from layoutbench.bench.tasks import TaskSpec, load_tasks, task_by_id
from layoutbench.flow.pipeline import generator_system_prompt, realize_thought
from layoutbench.flow.thoughts import SteeringConfig, load_steering

MODES = ("baseline", "solomon", "evaluate-only", "report", "interact")

EVALUATE_EXIT_CODES = {
    "correct": 0,
    "scaling_error": 3,
    "partially_correct": 4,
    "shape_error": 5,
    "runtime_error": 6,
}
EXIT_CONFIG_ERROR = 2


@dataclass(frozen=True)
class RunConfig:
    mode: str
    tasks_dir: Path
    out_dir: Path
    backends_path: Optional[Path] = None
    replay: bool = False
    record: bool = False
    steering_path: Optional[Path] = None
    task_id: str = ""
    gds_path: Optional[Path] = None
    backend_id: str = ""
    runs: int = 5
    timeout_s: Optional[float] = None
    resolution: Optional[int] = None
    overrides_path: Optional[Path] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.replay and self.record:
            raise ConfigError("choose either --replay or --record, not both")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layoutbench",
        description="Layout-generation benchmark harness",
    )
    parser.add_argument("--mode", required=True, choices=MODES)
    parser.add_argument("--tasks", type=Path, default=default_task_dir(),
                        help="task manifest directory (default: shipped tasks)")
    parser.add_argument("--backends", type=Path, help="backends config JSON")
    parser.add_argument("--out", type=Path, default=Path("bench-out"),
                        help="output directory for results, renders, report")
    parser.add_argument("--replay", action="store_true",
                        help="serve completions from the replay store only")
    parser.add_argument("--record", action="store_true",
                        help="record live completions into the replay store")
    parser.add_argument("--steering", type=Path, help="steering JSON file")
    parser.add_argument("--task", default="", help="task id (evaluate-only, interact)")
    parser.add_argument("--gds", type=Path, help="GDSII file to score (evaluate-only)")
    parser.add_argument("--backend", default="", help="backend id (interact)")
    parser.add_argument("--runs", type=int, default=5, help="runs per backend")
    parser.add_argument("--timeout", type=float, help="sandbox timeout seconds")
    parser.add_argument("--resolution", type=int, help="raster long axis in pixels")
    parser.add_argument("--overrides", type=Path, help="verdict override JSON (report)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        mode=args.mode,
        tasks_dir=args.tasks,
        out_dir=args.out,
        backends_path=args.backends,
        replay=args.replay,
        record=args.record,
        steering_path=args.steering,
        task_id=args.task,
        gds_path=args.gds,
        backend_id=args.backend,
        runs=args.runs,
        timeout_s=args.timeout,
        resolution=args.resolution,
        overrides_path=args.overrides,
    )


def _load_tasks(cfg: RunConfig) -> list[TaskSpec]:
    if not Path(cfg.tasks_dir).exists():
        raise ConfigError(f"tasks directory {cfg.tasks_dir} does not exist")
    try:
        # the self-classification guard protects benchmark runs; one-shot
        # modes trust the shipped fixtures and stay fast
        validate = cfg.mode in ("baseline", "solomon")
        tasks = load_tasks(cfg.tasks_dir, validate=validate)
    except LayoutBenchError as exc:
        raise ConfigError(f"cannot load tasks: {exc}") from exc
    if cfg.resolution:
        tasks = [
            TaskSpec(
                id=t.id, category=t.category, prompt=t.prompt,
                ground_truth_files=t.ground_truth_files,
                ground_truth_layouts=t.ground_truth_layouts,
                eval_options=t.eval_options.replaced(raster_long_axis=cfg.resolution),
                via_rules=t.via_rules, low_confidence=t.low_confidence, notes=t.notes,
            )
            for t in tasks
        ]
    return tasks


def _load_backends(cfg: RunConfig) -> tuple[BackendsConfig, dict[str, Backend]]:
    if cfg.backends_path is None:
        raise ConfigError("this mode needs --backends pointing at a config file")
    if not Path(cfg.backends_path).exists():
        raise ConfigError(f"backends config {cfg.backends_path} does not exist")
    try:
        bc = load_backends_config(cfg.backends_path)
    except (LayoutBenchError, json.JSONDecodeError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid backends config: {exc}") from exc
    store = ReplayStore(Path(cfg.out_dir) / "replay-store")
    if cfg.record or not cfg.replay:
        for backend_cfg in bc.backends.values():
            if backend_cfg.kind == "live" and backend_cfg.auth_env:
                if not os.environ.get(backend_cfg.auth_env):
                    raise ConfigError(
                        f"backend {backend_cfg.id!r} needs the credential variable "
                        f"{backend_cfg.auth_env} to be set (or run with --replay)"
                    )
    built = {
        name: build_backend(b, replay=cfg.replay, record=cfg.record, store=store)
        for name, b in bc.backends.items()
    }
    return bc, built


def _steering(cfg: RunConfig) -> SteeringConfig:
    if cfg.steering_path is None:
        return SteeringConfig()
    if not Path(cfg.steering_path).exists():
        raise ConfigError(f"steering file {cfg.steering_path} does not exist")
    try:
        return load_steering(cfg.steering_path)
    except (json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"invalid steering file: {exc}") from exc


def _limits(cfg: RunConfig) -> ExecutionLimits:
    if cfg.timeout_s is not None:
        return ExecutionLimits(timeout_s=cfg.timeout_s)
    return ExecutionLimits()


def command_run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    tasks = _load_tasks(cfg)
    bc, built = _load_backends(cfg)
    generators = [built[name] for name in bc.generators]
    assessors = [built[name] for name in bc.assessors]
    steering = _steering(cfg)
    results = run_matrix(
        tasks,
        generators,
        mode=cfg.mode,
        out_dir=cfg.out_dir,
        runs_per_backend=cfg.runs,
        assessors=assessors,
        steering=steering,
        limits=_limits(cfg),
    )
    table = aggregate(results)
    render_report(results, table, cfg.out_dir, tasks)
    print(f"{len(results.records)} records in {cfg.out_dir}", file=out)
    return 0


def command_evaluate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if not cfg.task_id:
        raise ConfigError("evaluate-only needs --task <id>")
    if cfg.gds_path is None:
        raise ConfigError("evaluate-only needs --gds <file>")
    tasks = _load_tasks(cfg)
    task = task_by_id(tasks, cfg.task_id)

    class _Outcome:
        status = "ok"

    layout = None
    try:
        layout = flatten(parse_gdsii(Path(cfg.gds_path).read_bytes()))
    except (OSError, LayoutBenchError) as exc:
        print(f"cannot read layout: {exc}", file=out)
    verdict = classify(_Outcome() if layout is not None else None, layout, task)
    print(f"category: {verdict.category}", file=out)
    print(f"best_scale: {verdict.best_scale:g}", file=out)
    for key, score in sorted(verdict.per_layer_scores.items()):
        print(f"layer {key}: IoU {score:.4f}", file=out)
    if verdict.evidence:
        print(f"evidence: {verdict.evidence}", file=out)
    if task.via_rules is not None and layout is not None:
        try:
            from layoutbench.evaluate.via_rules import check_via_rules

            violations = check_via_rules(layout, task.via_rules)
            for violation in violations:
                print(f"rule violation [{violation.code}]: {violation.message}", file=out)
            if not violations:
                print("rule check: clean", file=out)
        except LayoutBenchError as exc:
            print(f"rule check failed: {exc}", file=out)
    return EVALUATE_EXIT_CODES[verdict.category]


def command_report(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    tasks = _load_tasks(cfg)
    results = load_results(cfg.out_dir)
    overrides = None
    if cfg.overrides_path is not None:
        try:
            overrides = load_overrides(cfg.overrides_path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"invalid overrides file: {exc}") from exc
    table = aggregate(results, overrides)
    path = render_report(results, table, cfg.out_dir, tasks)
    print(f"report at {path}", file=out)
    return 0


def command_interact(
    cfg: RunConfig,
    out=None,
    input_fn: Callable[[str], str] = input,
) -> int:
    """Terminal refinement loop: generate, inspect, give feedback, retry."""
    out = out or sys.stdout
    if not cfg.task_id:
        raise ConfigError("interact needs --task <id>")
    tasks = _load_tasks(cfg)
    task = task_by_id(tasks, cfg.task_id)
    bc, built = _load_backends(cfg)
    backend_id = cfg.backend_id or (bc.generators[0] if bc.generators else "")
    if backend_id not in built:
        raise ConfigError(f"backend {backend_id!r} is not configured")
    backend = built[backend_id]
    steering = _steering(cfg)
    limits = _limits(cfg)
    out_dir = Path(cfg.out_dir)
    workroot = out_dir / "work" / task.id
    transcript_dir = out_dir / "transcripts"
    transcript_dir.mkdir(parents=True, exist_ok=True)

    system = generator_system_prompt(steering)
    conversation: list[ChatMessage] = [ChatMessage(role="user", text=task.prompt)]
    transcript: list[dict] = []
    iteration = 0
    print(f"task {task.id}: type feedback after each attempt, or 'quit' to stop", file=out)
    while True:
        request = ChatRequest(
            backend_id=backend.cfg.id,
            system_prompt=system,
            messages=tuple(conversation),
            temperature=backend.cfg.temperature_generate,
            max_output_tokens=backend.cfg.max_output_tokens,
            request_tag=f"{task.id}:interact:{iteration}",
        )
        try:
            response = backend.complete(request)
        except LayoutBenchError as exc:
            print(f"backend error: {exc}", file=out)
            transcript.append({"iteration": iteration, "error": str(exc)})
            response = None
        if response is not None:
            thought = realize_thought(
                f"interact:{iteration}", backend.cfg.id, iteration, response,
                task, limits, workroot, ("LayoutViewer",),
            )
            verdict = thought.verdict
            render_path = ""
            if thought.render_png is not None:
                render_file = out_dir / "renders" / task.id / f"interact-{iteration}.png"
                render_file.parent.mkdir(parents=True, exist_ok=True)
                render_file.write_bytes(thought.render_png)
                render_path = str(render_file)
            print(f"[{iteration}] verdict: {verdict.category}"
                  + (f"  render: {render_path}" if render_path else ""), file=out)
            transcript.append(
                {
                    "iteration": iteration,
                    "prompt_messages": [m.text for m in conversation],
                    "response": response.text,
                    "category": verdict.category,
                    "render": render_path,
                }
            )
            conversation.append(ChatMessage(role="assistant", text=response.text))
        try:
            feedback = input_fn("feedback> ")
        except EOFError:
            feedback = "quit"
        if feedback.strip().lower() in ("quit", "exit", "q"):
            break
        error_tail = ""
        if response is not None and thought.outcome is not None:
            if thought.verdict.category == "runtime_error" and thought.outcome.stderr.strip():
                error_tail = (
                    "The previous attempt failed with this error log:\n"
                    + thought.outcome.stderr[-2000:]
                    + "\n\n"
                )
        conversation.append(ChatMessage(role="user", text=error_tail + feedback))
        iteration += 1

    transcript_path = transcript_dir / f"{task.id}-{backend.cfg.id}.json"
    transcript_path.write_text(
        json.dumps({"task": task.id, "backend": backend.cfg.id, "turns": transcript},
                   indent=2) + "\n",
        encoding="utf-8",
    )
    print(f"transcript saved to {transcript_path}", file=out)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.mode in ("baseline", "solomon"):
            return command_run(cfg)
        if cfg.mode == "evaluate-only":
            return command_evaluate(cfg)
        if cfg.mode == "report":
            return command_report(cfg)
        return command_interact(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
