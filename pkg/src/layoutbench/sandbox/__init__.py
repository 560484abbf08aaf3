from layoutbench.sandbox.extract import (
    DEFAULT_BLOCKLIST,
    ExtractedCode,
    NoCodeBlock,
    SanitizedCode,
    extract_code,
    sanitize,
)
from layoutbench.sandbox.run import (
    Artifact,
    ExecutionLimits,
    ExecutionOutcome,
    SpawnFailure,
    default_worker_count,
    execute,
    execute_many,
)

__all__ = [
    "Artifact",
    "DEFAULT_BLOCKLIST",
    "ExecutionLimits",
    "ExecutionOutcome",
    "ExtractedCode",
    "NoCodeBlock",
    "SanitizedCode",
    "SpawnFailure",
    "default_worker_count",
    "execute",
    "execute_many",
    "extract_code",
    "sanitize",
]
