"""Chat request/response values and the stable request digest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Attachment:
    """PNG payload with the text line that must precede it in the wire
    message, tying the image to the thought it renders."""

    label: str
    png: bytes


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user" | "assistant"
    text: str
    attachments: tuple[Attachment, ...] = ()


@dataclass(frozen=True)
class ChatRequest:
    backend_id: str
    system_prompt: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 1.0
    max_output_tokens: int = 4096
    request_tag: str = ""  # task id + stage + run index; excluded from the digest

    def __post_init__(self):
        if not self.messages:
            raise ValueError("a chat request needs at least one message")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class TokenUsage:
    prompt: int = 0
    completion: int = 0


@dataclass(frozen=True)
class ChatResponse:
    text: str
    backend_id: str
    content_digest: str
    token_usage: TokenUsage = field(default_factory=TokenUsage)
    latency_s: float = 0.0
    error: str = ""
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.text and not self.error:
            raise ValueError("empty response text requires an error flag")


def normalize_request(req: ChatRequest) -> dict:
    """Canonical digest input: stable across processes and platforms.

    Covers backend id, prompts, message texts, attachment labels and
    payload hashes, temperature and token limit; excludes request_tag
    and anything time-dependent.
    """
    return {
        "backend": req.backend_id,
        "system": req.system_prompt,
        "messages": [
            {
                "role": m.role,
                "text": m.text,
                "attachments": [
                    {"label": a.label, "png_sha256": hashlib.sha256(a.png).hexdigest()}
                    for a in m.attachments
                ],
            }
            for m in req.messages
        ],
        "temperature": req.temperature,
        "max_output_tokens": req.max_output_tokens,
    }


def digest(req: ChatRequest) -> str:
    payload = json.dumps(normalize_request(req), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
