from layoutbench.llm.types import (
    Attachment,
    ChatMessage,
    ChatRequest,
    ChatResponse,
    TokenUsage,
    digest,
    normalize_request,
)
from layoutbench.llm.backends import (
    Backend,
    BackendConfig,
    BackendUnavailable,
    BackendsConfig,
    ImageUnsupported,
    LiveBackend,
    MockBackend,
    ReplayMiss,
    ReplayStore,
    build_backend,
    load_backends_config,
)

__all__ = [
    "Attachment",
    "Backend",
    "BackendConfig",
    "BackendUnavailable",
    "BackendsConfig",
    "ChatMessage",
    "ChatRequest",
    "ChatResponse",
    "ImageUnsupported",
    "LiveBackend",
    "MockBackend",
    "ReplayMiss",
    "ReplayStore",
    "TokenUsage",
    "build_backend",
    "digest",
    "load_backends_config",
    "normalize_request",
]
