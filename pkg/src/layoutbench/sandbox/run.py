"""Subprocess execution of untrusted generated code.

Each run gets a fresh working directory, a wall-clock timeout, an
address-space cap, and its GDSII artifacts collected afterwards.  This
is process isolation, not a security boundary; code still runs with the
caller's privileges.
"""

from __future__ import annotations

import os
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from layoutbench.errors import LayoutBenchError

DEFAULT_TIMEOUT_S = 120.0
DEFAULT_MEMORY_BYTES = 2 * 1024**3
DEFAULT_LOG_CAP = 256 * 1024
TRUNCATION_MARK = "...[truncated]...\n"


class SpawnFailure(LayoutBenchError):
    """The interpreter itself could not be started (not the code failing)."""


@dataclass(frozen=True)
class ExecutionLimits:
    timeout_s: float = DEFAULT_TIMEOUT_S
    memory_bytes: Optional[int] = DEFAULT_MEMORY_BYTES
    interpreter: tuple[str, ...] = (sys.executable,)
    artifact_extensions: tuple[str, ...] = (".gds",)
    log_cap_bytes: int = DEFAULT_LOG_CAP
    grace_s: float = 5.0
    source_name: str = "source.py"


@dataclass(frozen=True)
class Artifact:
    name: str
    payload: bytes


@dataclass(frozen=True)
class ExecutionOutcome:
    status: str  # ok | nonzero_exit | timeout | no_artifact | spawn_failure
    exit_code: Optional[int]
    stdout: str
    stderr: str
    duration_s: float
    artifacts: tuple[Artifact, ...] = ()
    primary_artifact: Optional[str] = None
    sanitizer_hits: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status == "ok" and self.primary_artifact is None:
            raise ValueError("ok outcomes must select a primary artifact")

    def primary_payload(self) -> Optional[bytes]:
        for art in self.artifacts:
            if art.name == self.primary_artifact:
                return art.payload
        return None


def _truncate_tail(data: bytes, cap: int) -> str:
    """Keep the last `cap` bytes; tracebacks end with the decisive line."""
    if len(data) <= cap:
        return data.decode("utf-8", "replace")
    tail = data[-cap:]
    cut = tail.find(b"\n")
    if 0 <= cut < len(tail) - 1:
        tail = tail[cut + 1 :]  # drop the partial first line
    return TRUNCATION_MARK + tail.decode("utf-8", "replace")


def _limit_resources(memory_bytes: Optional[int]) -> Callable[[], None]:
    def apply():
        if memory_bytes is not None:
            try:
                import resource

                resource.setrlimit(resource.RLIMIT_AS, (memory_bytes, memory_bytes))
            except (ImportError, ValueError, OSError):
                pass  # cap unsupported on this platform; timeout still guards

    return apply


def _scan_artifacts(workdir: Path, limits: ExecutionLimits) -> list[Artifact]:
    found = []
    for path in sorted(workdir.rglob("*")):
        if not path.is_file():
            continue
        if path.name in (limits.source_name, "stdout.txt", "stderr.txt"):
            continue
        if path.suffix.lower() in limits.artifact_extensions:
            found.append(Artifact(str(path.relative_to(workdir)), path.read_bytes()))
    return found


def execute(
    source: str,
    limits: ExecutionLimits,
    workdir: Path,
    sanitizer_hits: Sequence[str] = (),
) -> ExecutionOutcome:
    """Run source in a fresh directory and collect GDSII artifacts.

    Raises SpawnFailure only when the interpreter cannot start; every
    failure of the code itself is reported in the outcome.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    if any(workdir.iterdir()):
        raise ValueError(f"workdir {workdir} is not empty")
    source_path = workdir / limits.source_name
    source_path.write_text(source, encoding="utf-8")

    warnings: list[str] = []
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            list(limits.interpreter) + [limits.source_name],
            cwd=workdir,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            start_new_session=True,
            preexec_fn=_limit_resources(limits.memory_bytes) if os.name == "posix" else None,
        )
    except (FileNotFoundError, PermissionError) as exc:
        raise SpawnFailure(f"cannot start interpreter {limits.interpreter}: {exc}") from exc

    timed_out = False
    try:
        out, err = proc.communicate(timeout=limits.timeout_s)
    except subprocess.TimeoutExpired:
        timed_out = True
        try:
            os.killpg(proc.pid, 9)
        except (ProcessLookupError, PermissionError, OSError):
            proc.kill()
        try:
            out, err = proc.communicate(timeout=limits.grace_s)
        except subprocess.TimeoutExpired:
            out, err = b"", b""
    duration = time.monotonic() - start

    stdout = _truncate_tail(out or b"", limits.log_cap_bytes)
    stderr = _truncate_tail(err or b"", limits.log_cap_bytes)
    (workdir / "stdout.txt").write_text(stdout, encoding="utf-8")
    (workdir / "stderr.txt").write_text(stderr, encoding="utf-8")

    artifacts = _scan_artifacts(workdir, limits)
    primary = None
    if timed_out:
        status = "timeout"
    elif proc.returncode != 0:
        status = "nonzero_exit"
    elif not artifacts:
        status = "no_artifact"
    else:
        status = "ok"
        if len(artifacts) == 1:
            primary = artifacts[0].name
        else:
            primary = max(artifacts, key=lambda a: (len(a.payload), a.name)).name
            warnings.append(
                f"AmbiguousArtifact: {len(artifacts)} candidates, largest selected"
            )

    return ExecutionOutcome(
        status=status,
        exit_code=None if timed_out else proc.returncode,
        stdout=stdout,
        stderr=stderr,
        duration_s=duration,
        artifacts=tuple(artifacts),
        primary_artifact=primary,
        sanitizer_hits=tuple(sanitizer_hits),
        warnings=tuple(warnings),
    )


def default_worker_count(cap: Optional[int] = None) -> int:
    workers = os.cpu_count() or 1
    return min(workers, cap) if cap else workers


def execute_many(
    jobs: Iterable[tuple[str, Path]],
    limits: ExecutionLimits,
    max_workers: Optional[int] = None,
) -> list[ExecutionOutcome]:
    """Run (source, workdir) jobs under a bounded worker pool."""
    jobs = list(jobs)
    workers = max_workers or default_worker_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(execute, src, limits, wd) for src, wd in jobs]
        return [f.result() for f in futures]
